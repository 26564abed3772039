#pragma once

#include <optional>
#include <string>

#include "hdfol/herbrand.hpp"
#include "hdfol/horn.hpp"
#include "hdfol/kripke.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

// Canonical 7-bit concrete syntax. `ambient` is the world index in force at
// the point of printing: world tags and equation indices equal to it are
// omitted, exactly as the parser fills them back in.
std::string print(const NominalTerm& k);
std::string print(const HybridTerm& t, const std::optional<NominalTerm>& ambient = std::nullopt);
std::string print(const Action& a);
std::string print(const Sentence& g, const std::optional<NominalTerm>& ambient = std::nullopt);
std::string print(const VariableBlock& vars);
std::string print(const Query& q);

// Declarations, one per line.
std::string print(const Signature& sig);
// Declarations, a blank line, then one clause per line.
std::string print(const Theory& theory);
// Declarations followed by a `model { ... }` block.
std::string print(const KripkeModel& m);

// Element and world names are printed bare when they lex as a name and
// quoted otherwise.
std::string print_name(const std::string& name);

}  // namespace hdfol
