#pragma once

#include <optional>
#include <string>

#include "hdfol/diagnostic.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

// `scope` lists the free variables the term or sentence may mention.
Diagnostics check_nominal_term(const Signature& sig, const NominalTerm& k, const VariableBlock& scope = {});

// Sort s with t in T_{k,s}: rigid applications keep their arity, flexible
// applications are evaluated at their own tag, and a subterm tagged with a
// different world is admitted only when its sort is rigid.
Result<std::string> check_hybrid_term(const Signature& sig, const HybridTerm& t, const NominalTerm& k,
                                      const VariableBlock& scope = {});

// World-independent variant: accepts only terms of rigid sort.
Result<std::string> check_rigid_term(const Signature& sig, const HybridTerm& t, const VariableBlock& scope = {});

Diagnostics check_action(const Signature& sig, const Action& a);

// Well-formedness over Delta[scope]. Bound variables must not shadow
// signature symbols or variables already in scope.
Diagnostics check_sentence(const Signature& sig, const Sentence& g, const VariableBlock& scope = {});

}  // namespace hdfol
