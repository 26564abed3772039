#pragma once

#include <map>
#include <string>

#include "hdfol/diagnostic.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

// theta : X -> Y. Nominal variables map to nominal terms over Y, rigid
// variables to rigid-sorted hybrid terms over Delta[Y]. Variables of X with no
// entry are mapped to themselves (which requires them to be in Y too).
struct Substitution {
  VariableBlock domain;
  VariableBlock codomain;
  std::map<std::string, NominalTerm> nominal;
  std::map<std::string, HybridTerm> rigid;

  static Substitution identity(const VariableBlock& vars);

  NominalTerm image(const NominalTerm& var) const;
  HybridTerm image(const HybridTerm& var) const;

  bool operator==(const Substitution&) const = default;
};

// Checks that every image is well-formed over Delta[codomain] at the right sort.
Diagnostics validate_substitution(const Signature& sig, const Substitution& theta);

NominalTerm apply_substitution(const Substitution& theta, const NominalTerm& k);
HybridTerm apply_substitution(const Substitution& theta, const HybridTerm& t);
// Capture-avoiding: a binder whose variable occurs free in an image is renamed.
Sentence apply_substitution(const Substitution& theta, const Sentence& g);

// (first ; second)(x) = second(first(x)). Throws Error on a block mismatch.
Substitution compose_substitutions(const Substitution& first, const Substitution& second);

}  // namespace hdfol
