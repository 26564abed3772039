#pragma once

#include <map>
#include <string>

#include "hdfol/diagnostic.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

// phi : source -> target. Symbols absent from a map are mapped to the
// same name in the target.
struct SignatureMorphism {
  Signature source;
  Signature target;
  std::map<std::string, std::string> nominal_map;  // nominal operations and relations
  std::map<std::string, std::string> sort_map;
  std::map<std::string, std::string> op_map;
  std::map<std::string, std::string> rel_map;

  static SignatureMorphism identity(const Signature& sig);

  std::string nominal(const std::string& name) const;
  std::string sort(const std::string& name) const;
  std::string op(const std::string& name) const;
  std::string rel(const std::string& name) const;
};

// Arity preservation on every family; rigid symbols go to rigid symbols.
Diagnostics validate_morphism(const SignatureMorphism& phi);

SignatureMorphism compose_morphisms(const SignatureMorphism& first, const SignatureMorphism& second);

NominalTerm translate(const SignatureMorphism& phi, const NominalTerm& k);
HybridTerm translate(const SignatureMorphism& phi, const HybridTerm& t);
Action translate(const SignatureMorphism& phi, const Action& a);
Sentence translate_sentence(const SignatureMorphism& phi, const Sentence& g);

}  // namespace hdfol
