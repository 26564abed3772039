#include "hdfol/horn.hpp"

#include "hdfol/wellformed.hpp"

namespace hdfol {

namespace {

std::optional<std::string> offending(const Sentence& g) {
  using K = Sentence::Kind;
  switch (g.kind) {
    case K::NomEq:
    case K::NomRel:
    case K::HybEq:
    case K::RigidRel:
    case K::FlexRel:
      return std::nullopt;
    case K::ActRel:
      return "action relation allowed only as a hypothesis in Horn theory";
    case K::Not:
      return "negation not allowed in Horn theory";
    case K::And:
      return g.body.empty() ? "'true' allowed only as an empty hypothesis in Horn theory"
                            : "conjunction allowed only as a hypothesis in Horn theory";
    case K::Implies:
      for (const auto& h : g.hypotheses) {
        if (!h.is_atom_or_action()) return "implication hypothesis must be atomic in Horn theory";
      }
      return offending(g.sub());
    case K::At:
    case K::Store:
    case K::Forall:
    case K::Nec:
    case K::Next:
      return offending(g.sub());
  }
  return std::nullopt;
}

}  // namespace

Diagnostics validate_horn_clause(const Sentence& g) {
  if (auto msg = offending(g)) return {{*msg, {}}};
  return {};
}

Diagnostics validate_theory(const Theory& theory) {
  Diagnostics diags = validate_signature(theory.signature);
  if (!diags.empty()) return diags;
  for (const auto& g : theory.clauses) {
    for (auto& d : check_sentence(theory.signature, g)) diags.push_back(std::move(d));
    for (auto& d : validate_horn_clause(g)) diags.push_back(std::move(d));
  }
  return diags;
}

}  // namespace hdfol
