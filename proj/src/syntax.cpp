#include "hdfol/syntax.hpp"

#include <algorithm>
#include <set>

namespace hdfol {

NominalTerm nom(std::string symbol, std::vector<NominalTerm> args) {
  return NominalTerm{NominalTerm::Kind::App, std::move(symbol), std::move(args)};
}

NominalTerm nom_var(std::string name) { return NominalTerm{NominalTerm::Kind::Var, std::move(name), {}}; }

HybridTerm rigid_app(std::string symbol, std::vector<HybridTerm> args) {
  HybridTerm t;
  t.kind = HybridTerm::Kind::Rigid;
  t.symbol = std::move(symbol);
  t.args = std::move(args);
  return t;
}

HybridTerm flex_app(std::string symbol, NominalTerm tag, std::vector<HybridTerm> args) {
  HybridTerm t;
  t.kind = HybridTerm::Kind::Flex;
  t.symbol = std::move(symbol);
  t.tag = std::move(tag);
  t.args = std::move(args);
  return t;
}

HybridTerm data_var(std::string name, std::string sort) {
  HybridTerm t;
  t.kind = HybridTerm::Kind::Var;
  t.symbol = std::move(name);
  t.sort = std::move(sort);
  return t;
}

Action modality(std::string name) { return Action{Action::Kind::Modality, std::move(name), {}}; }
Action seq(Action a, Action b) { return Action{Action::Kind::Seq, {}, {std::move(a), std::move(b)}}; }
Action alt(Action a, Action b) { return Action{Action::Kind::Union, {}, {std::move(a), std::move(b)}}; }
Action star(Action a) { return Action{Action::Kind::Star, {}, {std::move(a)}}; }

namespace {

Sentence make(Sentence::Kind kind) {
  Sentence s;
  s.kind = kind;
  return s;
}

}  // namespace

Sentence nom_eq(NominalTerm k1, NominalTerm k2) {
  Sentence s = make(Sentence::Kind::NomEq);
  s.nominals = {std::move(k1), std::move(k2)};
  return s;
}

Sentence nom_rel(std::string rel, std::vector<NominalTerm> args) {
  Sentence s = make(Sentence::Kind::NomRel);
  s.symbol = std::move(rel);
  s.nominals = std::move(args);
  return s;
}

Sentence hyb_eq(NominalTerm k, std::string sort, HybridTerm t1, HybridTerm t2) {
  Sentence s = make(Sentence::Kind::HybEq);
  s.nominals = {std::move(k)};
  s.sort = std::move(sort);
  s.terms = {std::move(t1), std::move(t2)};
  return s;
}

Sentence rigid_rel(std::string rel, std::vector<HybridTerm> args) {
  Sentence s = make(Sentence::Kind::RigidRel);
  s.symbol = std::move(rel);
  s.terms = std::move(args);
  return s;
}

Sentence flex_rel(std::string rel, NominalTerm k, std::vector<HybridTerm> args) {
  Sentence s = make(Sentence::Kind::FlexRel);
  s.symbol = std::move(rel);
  s.nominals = {std::move(k)};
  s.terms = std::move(args);
  return s;
}

Sentence act_rel(Action a, NominalTerm k1, NominalTerm k2) {
  Sentence s = make(Sentence::Kind::ActRel);
  s.action = std::move(a);
  s.nominals = {std::move(k1), std::move(k2)};
  return s;
}

Sentence at(NominalTerm k, Sentence g) {
  Sentence s = make(Sentence::Kind::At);
  s.nominals = {std::move(k)};
  s.body = {std::move(g)};
  return s;
}

Sentence negation(Sentence g) {
  Sentence s = make(Sentence::Kind::Not);
  s.body = {std::move(g)};
  return s;
}

Sentence conj(std::vector<Sentence> gs) {
  Sentence s = make(Sentence::Kind::And);
  s.body = std::move(gs);
  return s;
}

Sentence truth() { return conj({}); }

Sentence implies(std::vector<Sentence> hypotheses, Sentence conclusion) {
  Sentence s = make(Sentence::Kind::Implies);
  s.hypotheses = std::move(hypotheses);
  s.body = {std::move(conclusion)};
  return s;
}

Sentence store(std::string z, Sentence g) {
  Sentence s = make(Sentence::Kind::Store);
  s.symbol = std::move(z);
  s.body = {std::move(g)};
  return s;
}

Sentence forall(VariableBlock vars, Sentence g) {
  Sentence s = make(Sentence::Kind::Forall);
  s.vars = std::move(vars);
  s.body = {std::move(g)};
  return s;
}

Sentence nec(Action a, Sentence g) {
  Sentence s = make(Sentence::Kind::Nec);
  s.action = std::move(a);
  s.body = {std::move(g)};
  return s;
}

Sentence next_op(std::string sigma, Sentence g) {
  Sentence s = make(Sentence::Kind::Next);
  s.symbol = std::move(sigma);
  s.body = {std::move(g)};
  return s;
}

Sentence exists(VariableBlock vars, Sentence g) { return negation(forall(std::move(vars), negation(std::move(g)))); }

std::size_t depth(const NominalTerm& k) {
  std::size_t d = 0;
  for (const auto& a : k.args) d = std::max(d, depth(a) + 1);
  return d;
}

std::size_t depth(const HybridTerm& t) {
  std::size_t d = 0;
  for (const auto& a : t.args) d = std::max(d, depth(a) + 1);
  return d;
}

namespace {

template <typename T>
std::strong_ordering compare_children(const std::vector<T>& a, const std::vector<T>& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (auto c = canonical_compare(a[i], b[i]); c != 0) return c;
  }
  return a.size() <=> b.size();
}

}  // namespace

std::strong_ordering canonical_compare(const NominalTerm& a, const NominalTerm& b) {
  if (auto c = depth(a) <=> depth(b); c != 0) return c;
  if (auto c = a.symbol <=> b.symbol; c != 0) return c;
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  return compare_children(a.args, b.args);
}

std::strong_ordering canonical_compare(const HybridTerm& a, const HybridTerm& b) {
  if (auto c = depth(a) <=> depth(b); c != 0) return c;
  if (auto c = a.symbol <=> b.symbol; c != 0) return c;
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (a.tag && b.tag) {
    if (auto c = canonical_compare(*a.tag, *b.tag); c != 0) return c;
  }
  if (auto c = a.sort <=> b.sort; c != 0) return c;
  return compare_children(a.args, b.args);
}

bool is_ground(const NominalTerm& k) {
  if (k.is_var()) return false;
  return std::all_of(k.args.begin(), k.args.end(), [](const auto& a) { return is_ground(a); });
}

bool is_ground(const HybridTerm& t) {
  if (t.kind == HybridTerm::Kind::Var) return false;
  if (t.tag && !is_ground(*t.tag)) return false;
  return std::all_of(t.args.begin(), t.args.end(), [](const auto& a) { return is_ground(a); });
}

namespace {

class FreeVariableCollector {
 public:
  VariableBlock result;

  void nominal(const NominalTerm& k) {
    if (k.is_var()) {
      if (!bound(k.symbol) && !result.has_nominal(k.symbol)) result.nominal.push_back(k.symbol);
      return;
    }
    for (const auto& a : k.args) nominal(a);
  }

  void hybrid(const HybridTerm& t) {
    if (t.kind == HybridTerm::Kind::Var) {
      if (!bound(t.symbol) && !result.rigid_sort(t.symbol)) result.rigid.push_back({t.symbol, t.sort});
      return;
    }
    if (t.tag) nominal(*t.tag);
    for (const auto& a : t.args) hybrid(a);
  }

  void sentence(const Sentence& g) {
    for (const auto& k : g.nominals) nominal(k);
    for (const auto& t : g.terms) hybrid(t);
    for (const auto& h : g.hypotheses) sentence(h);
    switch (g.kind) {
      case Sentence::Kind::Store:
        scopes_.push_back({g.symbol});
        sentence(g.sub());
        scopes_.pop_back();
        return;
      case Sentence::Kind::Forall: {
        std::vector<std::string> names = g.vars.nominal;
        for (const auto& x : g.vars.rigid) names.push_back(x.name);
        scopes_.push_back(std::move(names));
        sentence(g.sub());
        scopes_.pop_back();
        return;
      }
      default:
        for (const auto& b : g.body) sentence(b);
    }
  }

 private:
  std::vector<std::vector<std::string>> scopes_;

  bool bound(const std::string& name) const {
    for (const auto& s : scopes_) {
      if (std::find(s.begin(), s.end(), name) != s.end()) return true;
    }
    return false;
  }
};

}  // namespace

VariableBlock free_variables(const Sentence& g) {
  FreeVariableCollector c;
  c.sentence(g);
  return c.result;
}

VariableBlock free_variables(const HybridTerm& t) {
  FreeVariableCollector c;
  c.hybrid(t);
  return c.result;
}

VariableBlock free_variables(const NominalTerm& k) {
  FreeVariableCollector c;
  c.nominal(k);
  return c.result;
}

}  // namespace hdfol
