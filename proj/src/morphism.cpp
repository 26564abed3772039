#include "hdfol/morphism.hpp"

namespace hdfol {

namespace {

std::string lookup(const std::map<std::string, std::string>& m, const std::string& name) {
  auto it = m.find(name);
  return it == m.end() ? name : it->second;
}

}  // namespace

SignatureMorphism SignatureMorphism::identity(const Signature& sig) {
  SignatureMorphism phi;
  phi.source = sig;
  phi.target = sig;
  return phi;
}

std::string SignatureMorphism::nominal(const std::string& name) const { return lookup(nominal_map, name); }
std::string SignatureMorphism::sort(const std::string& name) const { return lookup(sort_map, name); }
std::string SignatureMorphism::op(const std::string& name) const { return lookup(op_map, name); }
std::string SignatureMorphism::rel(const std::string& name) const { return lookup(rel_map, name); }

Diagnostics validate_morphism(const SignatureMorphism& phi) {
  Diagnostics diags;
  auto report = [&](std::string msg) { diags.push_back({std::move(msg), {}}); };
  const Signature& src = phi.source;
  const Signature& dst = phi.target;

  for (const auto& f : src.nominal_ops) {
    const NominalSymbol* g = dst.find_nominal_op(phi.nominal(f.name));
    if (g == nullptr || g->arity != f.arity) report("nominal operation '" + f.name + "' is not mapped arity-preservingly");
  }
  for (const auto& r : src.nominal_rels) {
    const NominalSymbol* g = dst.find_nominal_rel(phi.nominal(r.name));
    if (g == nullptr || g->arity != r.arity) report("nominal relation '" + r.name + "' is not mapped arity-preservingly");
  }
  for (const auto& s : src.sorts) {
    const SortDecl* t = dst.find_sort(phi.sort(s.name));
    if (t == nullptr) report("sort '" + s.name + "' has no image");
    else if (s.rigid && !t->rigid) report("rigid sort '" + s.name + "' mapped to a flexible sort");
  }
  auto map_sorts = [&](const std::vector<std::string>& sorts) {
    std::vector<std::string> out;
    for (const auto& s : sorts) out.push_back(phi.sort(s));
    return out;
  };
  for (const auto& f : src.ops) {
    const DataOp* g = dst.find_op(phi.op(f.name));
    if (g == nullptr || g->args != map_sorts(f.args) || g->result != phi.sort(f.result)) {
      report("operation '" + f.name + "' is not mapped profile-preservingly");
    } else if (f.rigid && !g->rigid) {
      report("rigid operation '" + f.name + "' mapped to a flexible one");
    }
  }
  for (const auto& r : src.rels) {
    const DataRel* g = dst.find_rel(phi.rel(r.name));
    if (g == nullptr || g->args != map_sorts(r.args)) {
      report("relation '" + r.name + "' is not mapped profile-preservingly");
    } else if (r.rigid && !g->rigid) {
      report("rigid relation '" + r.name + "' mapped to a flexible one");
    }
  }
  return diags;
}

SignatureMorphism compose_morphisms(const SignatureMorphism& first, const SignatureMorphism& second) {
  SignatureMorphism out;
  out.source = first.source;
  out.target = second.target;
  const Signature& src = first.source;
  for (const auto& f : src.nominal_ops) out.nominal_map[f.name] = second.nominal(first.nominal(f.name));
  for (const auto& r : src.nominal_rels) out.nominal_map[r.name] = second.nominal(first.nominal(r.name));
  for (const auto& s : src.sorts) out.sort_map[s.name] = second.sort(first.sort(s.name));
  for (const auto& f : src.ops) out.op_map[f.name] = second.op(first.op(f.name));
  for (const auto& r : src.rels) out.rel_map[r.name] = second.rel(first.rel(r.name));
  return out;
}

NominalTerm translate(const SignatureMorphism& phi, const NominalTerm& k) {
  NominalTerm out = k;
  if (!k.is_var()) out.symbol = phi.nominal(k.symbol);
  for (auto& a : out.args) a = translate(phi, a);
  return out;
}

HybridTerm translate(const SignatureMorphism& phi, const HybridTerm& t) {
  HybridTerm out = t;
  if (t.kind == HybridTerm::Kind::Var) {
    out.sort = phi.sort(t.sort);
  } else {
    out.symbol = phi.op(t.symbol);
  }
  if (out.tag) out.tag = translate(phi, *out.tag);
  for (auto& a : out.args) a = translate(phi, a);
  // A flexible operation mapped onto a rigid one loses its tag.
  if (out.kind == HybridTerm::Kind::Flex) {
    const DataOp* g = phi.target.find_op(out.symbol);
    if (g != nullptr && g->rigid) {
      out.kind = HybridTerm::Kind::Rigid;
      out.tag.reset();
    }
  }
  return out;
}

Action translate(const SignatureMorphism& phi, const Action& a) {
  Action out = a;
  if (a.kind == Action::Kind::Modality) out.modality = phi.nominal(a.modality);
  for (auto& p : out.parts) p = translate(phi, p);
  return out;
}

Sentence translate_sentence(const SignatureMorphism& phi, const Sentence& g) {
  using K = Sentence::Kind;
  Sentence out = g;
  switch (g.kind) {
    case K::NomRel:
    case K::Next:
      out.symbol = phi.nominal(g.symbol);
      break;
    case K::RigidRel:
    case K::FlexRel:
      out.symbol = phi.rel(g.symbol);
      break;
    case K::HybEq:
      out.sort = phi.sort(g.sort);
      break;
    case K::Forall:
      for (auto& x : out.vars.rigid) x.sort = phi.sort(x.sort);
      break;
    default:
      break;
  }
  for (auto& k : out.nominals) k = translate(phi, k);
  for (auto& t : out.terms) t = translate(phi, t);
  if (out.action) out.action = translate(phi, *out.action);
  for (auto& h : out.hypotheses) h = translate_sentence(phi, h);
  for (auto& b : out.body) b = translate_sentence(phi, b);
  // A flexible relation mapped onto a rigid one drops its world index.
  if (out.kind == K::FlexRel) {
    const DataRel* r = phi.target.find_rel(out.symbol);
    if (r != nullptr && r->rigid) {
      out.kind = K::RigidRel;
      out.nominals.clear();
    }
  }
  return out;
}

}  // namespace hdfol
