#pragma once

#include <optional>
#include <string_view>

#include "hdfol/diagnostic.hpp"
#include "hdfol/herbrand.hpp"
#include "hdfol/horn.hpp"
#include "hdfol/kripke.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

// Declarations followed by clauses, each terminated by ';'. The signature is
// validated and every clause is checked to be a closed Horn clause.
Result<Theory> parse_theory(std::string_view text);

// Declarations only.
Result<Signature> parse_signature(std::string_view text);

// A `model { ... }` block over `sig`, validated against it.
Result<KripkeModel> parse_model(std::string_view text, const Signature& sig);
// Declarations followed by a model block (the .hdm layout).
Result<KripkeModel> parse_model_file(std::string_view text);

// Any sentence of the full grammar. Free variables must be listed in
// `scope`; `ambient` supplies the world for untagged flexible symbols.
Result<Sentence> parse_sentence(std::string_view text, const Signature& sig, const VariableBlock& scope = {},
                                const std::optional<NominalTerm>& ambient = std::nullopt);

// `exists X . e1 /\ ... /\ en` with atomic or action-relation conjuncts, or
// such a conjunction alone when there are no variables.
Result<Query> parse_query(std::string_view text, const Signature& sig);

Result<Action> parse_action(std::string_view text, const Signature& sig);
Result<NominalTerm> parse_nominal_term(std::string_view text, const Signature& sig, const VariableBlock& scope = {});
Result<HybridTerm> parse_hybrid_term(std::string_view text, const Signature& sig, const VariableBlock& scope = {},
                                     const std::optional<NominalTerm>& ambient = std::nullopt);

// True when the text contains a model block.
bool looks_like_model_file(std::string_view text);

}  // namespace hdfol
