#include "hdfol/initial.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "hdfol/frontend/printer.hpp"
#include "hdfol/wellformed.hpp"

namespace hdfol {

namespace {

template <typename T>
void canonical_sort(std::vector<T>& terms) {
  std::sort(terms.begin(), terms.end(), [](const T& a, const T& b) { return canonical_compare(a, b) < 0; });
}

// Calls f on every tuple drawn from `choices` whose deepest component has
// depth exactly `target`. Components are drawn in list order.
template <typename T, typename F>
void for_each_tuple_at_depth(const std::vector<const std::vector<T>*>& choices, std::size_t target, F&& f) {
  std::vector<T> tuple;
  std::function<void(std::size_t, bool)> rec = [&](std::size_t i, bool reached) {
    if (i == choices.size()) {
      if (reached) f(tuple);
      return;
    }
    for (const T& c : *choices[i]) {
      const std::size_t d = depth(c);
      if (d > target) continue;
      tuple.push_back(c);
      rec(i + 1, reached || d == target);
      tuple.pop_back();
    }
  };
  rec(0, false);
}

template <typename F>
void for_each_index_tuple(const std::vector<std::size_t>& radix, F&& f) {
  for (auto r : radix) {
    if (r == 0) return;
  }
  std::vector<std::size_t> digits(radix.size(), 0);
  while (true) {
    f(digits);
    std::size_t i = digits.size();
    while (true) {
      if (i == 0) return;
      --i;
      if (++digits[i] < radix[i]) break;
      digits[i] = 0;
    }
  }
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) : parent_(n), rank_(n, 0), least_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
    std::iota(least_.begin(), least_.end(), 0);
  }

  std::size_t find(std::size_t x) const {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    least_[a] = std::min(least_[a], least_[b]);
    return true;
  }

  // Smallest member of x's class.
  std::size_t least(std::size_t x) const { return least_[find(x)]; }

 private:
  mutable std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
  std::vector<std::size_t> least_;
};

}  // namespace

std::optional<std::size_t> TermUniverse::nominal_index(const NominalTerm& k) const {
  auto it = std::lower_bound(nominal_terms.begin(), nominal_terms.end(), k,
                             [](const NominalTerm& a, const NominalTerm& b) { return canonical_compare(a, b) < 0; });
  if (it == nominal_terms.end() || *it != k) return std::nullopt;
  return static_cast<std::size_t>(it - nominal_terms.begin());
}

TermUniverse build_term_universe(const Signature& sig, std::size_t depth_bound) {
  TermUniverse u;
  u.signature = sig;
  u.depth_bound = depth_bound;

  std::vector<NominalTerm>& noms = u.nominal_terms;
  for (const auto& f : sig.nominal_ops) {
    if (f.arity == 0) noms.push_back(nom(f.name));
  }
  if (noms.empty()) throw Error("no nominal constants: the world universe is empty");
  for (std::size_t d = 1; d <= depth_bound; ++d) {
    std::vector<NominalTerm> fresh;
    for (const auto& f : sig.nominal_ops) {
      if (f.arity == 0) continue;
      std::vector<const std::vector<NominalTerm>*> choices(f.arity, &noms);
      for_each_tuple_at_depth(choices, d - 1, [&](const std::vector<NominalTerm>& args) { fresh.push_back(nom(f.name, args)); });
    }
    noms.insert(noms.end(), fresh.begin(), fresh.end());
  }
  canonical_sort(noms);
  bool truncated =
      std::any_of(sig.nominal_ops.begin(), sig.nominal_ops.end(), [](const auto& f) { return f.arity > 0; });

  // Rigid-sorted terms are collected once; flexible-sorted ones per index.
  std::map<std::string, std::vector<HybridTerm>> rigid;
  std::vector<std::map<std::string, std::vector<HybridTerm>>> flex(noms.size());
  auto pool = [&](const std::string& sort, std::size_t k) -> std::vector<HybridTerm>& {
    return sig.is_rigid_sort(sort) ? rigid[sort] : flex[k][sort];
  };
  for (std::size_t d = 0; d <= depth_bound + 1; ++d) {
    std::vector<std::tuple<std::string, std::size_t, HybridTerm>> fresh;
    for (const auto& f : sig.ops) {
      if (f.args.empty() != (d == 0)) continue;
      const std::size_t indices = f.rigid ? 1 : noms.size();
      for (std::size_t k = 0; k < indices; ++k) {
        if (f.args.empty()) {
          fresh.emplace_back(f.result, k, f.rigid ? rigid_app(f.name) : flex_app(f.name, noms[k]));
          continue;
        }
        std::vector<const std::vector<HybridTerm>*> choices;
        for (const auto& a : f.args) {
          auto& p = pool(a, k);
          choices.push_back(&p);
        }
        for_each_tuple_at_depth(choices, d - 1, [&](const std::vector<HybridTerm>& args) {
          fresh.emplace_back(f.result, k, f.rigid ? rigid_app(f.name, args) : flex_app(f.name, noms[k], args));
        });
      }
    }
    if (d == depth_bound + 1) {
      if (!fresh.empty()) truncated = true;
      break;
    }
    for (auto& [sort, k, t] : fresh) pool(sort, k).push_back(std::move(t));
  }
  for (auto& [_, ts] : rigid) canonical_sort(ts);
  for (auto& m : flex) {
    for (auto& [_, ts] : m) canonical_sort(ts);
  }

  u.hybrid_terms.resize(noms.size());
  for (std::size_t k = 0; k < noms.size(); ++k) {
    for (const auto& s : sig.sorts) {
      u.hybrid_terms[k][s.name] = s.rigid ? rigid[s.name] : flex[k][s.name];
    }
  }
  u.completeness = truncated ? TermUniverse::Completeness::Truncated : TermUniverse::Completeness::Exact;
  return u;
}

namespace {

// One interned term graph for every term of the universe. Nominal nodes come
// first, then hybrid nodes; within each family node order is canonical term
// order, so the least node of a class is its canonical representative. A
// flexible application's first child is its world tag.
class TermBank {
 public:
  struct Node {
    bool nominal = false;
    bool flexible = false;  // flexible operation application
    bool rigid_sort = false;
    std::string symbol;
    std::string sort;  // data nodes
    std::vector<std::size_t> children;
  };

  explicit TermBank(const TermUniverse& u) {
    const Signature& sig = u.signature;
    for (const auto& k : u.nominal_terms) {
      Node n;
      n.nominal = true;
      n.symbol = k.symbol;
      for (const auto& a : k.args) n.children.push_back(nominal_index_.at(a));
      nominal_index_.emplace(k, nodes_.size());
      nominal_terms_.push_back(k);
      nodes_.push_back(std::move(n));
    }
    nominal_count_ = nodes_.size();

    std::set<HybridTerm> seen;
    std::vector<HybridTerm> all;
    for (const auto& per_index : u.hybrid_terms) {
      for (const auto& [_, ts] : per_index) {
        for (const auto& t : ts) {
          if (seen.insert(t).second) all.push_back(t);
        }
      }
    }
    canonical_sort(all);
    // Subterms have smaller depth, so they precede their parents.
    for (const auto& t : all) {
      const DataOp* f = sig.find_op(t.symbol);
      Node n;
      n.flexible = t.kind == HybridTerm::Kind::Flex;
      n.symbol = t.symbol;
      n.sort = f->result;
      n.rigid_sort = sig.is_rigid_sort(f->result);
      if (n.flexible) n.children.push_back(nominal_index_.at(*t.tag));
      for (const auto& a : t.args) n.children.push_back(hybrid_index_.at(a));
      hybrid_index_.emplace(t, nodes_.size());
      hybrid_terms_.push_back(t);
      nodes_.push_back(std::move(n));
    }
    uf_ = UnionFind(nodes_.size());
    close();
  }

  std::size_t size() const { return nodes_.size(); }
  std::size_t nominal_count() const { return nominal_count_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const NominalTerm& nominal_term(std::size_t i) const { return nominal_terms_[i]; }
  const HybridTerm& hybrid_term(std::size_t i) const { return hybrid_terms_[i - nominal_count_]; }

  std::optional<std::size_t> node_of(const NominalTerm& k) const {
    auto it = nominal_index_.find(k);
    return it == nominal_index_.end() ? std::nullopt : std::optional(it->second);
  }
  std::optional<std::size_t> node_of(const HybridTerm& t) const {
    auto it = hybrid_index_.find(t);
    return it == hybrid_index_.end() ? std::nullopt : std::optional(it->second);
  }

  std::size_t find(std::size_t x) const { return uf_.find(x); }
  std::size_t representative(std::size_t x) const { return uf_.least(x); }
  bool unite(std::size_t a, std::size_t b) { return uf_.unite(a, b); }

  // Congruence closure: merge nodes with the same symbol and congruent
  // children until nothing changes. Afterwards the signature table is
  // keyed by current class roots.
  void close() {
    while (true) {
      table_.clear();
      bool merged = false;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto [it, inserted] = table_.emplace(key(nodes_[i].symbol, classes_of(nodes_[i].children)), i);
        if (!inserted && unite(it->second, i)) merged = true;
      }
      if (!merged) return;
    }
  }

  // Class of the node symbol(children), if such a node exists.
  std::optional<std::size_t> lookup(const std::string& symbol, const std::vector<std::size_t>& child_classes) const {
    auto it = table_.find(key(symbol, child_classes));
    if (it == table_.end()) return std::nullopt;
    return find(it->second);
  }

  // Class roots of the given nodes, ordered by representative.
  std::vector<std::size_t> classes(const std::function<bool(std::size_t)>& keep) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (keep(i) && representative(i) == i) out.push_back(find(i));
    }
    return out;
  }

 private:
  std::vector<Node> nodes_;
  std::size_t nominal_count_ = 0;
  std::vector<NominalTerm> nominal_terms_;
  std::vector<HybridTerm> hybrid_terms_;
  std::map<NominalTerm, std::size_t> nominal_index_;
  std::map<HybridTerm, std::size_t> hybrid_index_;
  UnionFind uf_;
  std::unordered_map<std::string, std::size_t> table_;

  std::vector<std::size_t> classes_of(const std::vector<std::size_t>& nodes) const {
    std::vector<std::size_t> out;
    out.reserve(nodes.size());
    for (auto n : nodes) out.push_back(find(n));
    return out;
  }

  static std::string key(const std::string& symbol, const std::vector<std::size_t>& children) {
    std::string k = symbol;
    k.push_back('\0');
    for (auto c : children) k.append(reinterpret_cast<const char*>(&c), sizeof c);
    return k;
  }
};

using Env = std::map<std::string, std::size_t>;
using Tuple = std::vector<std::size_t>;

}  // namespace

class SaturationState {
 public:
  SaturationState(const Signature& sig, const TermUniverse& u) : sig_(sig), bank(u) {}

  Signature sig_;
  TermBank bank;
  std::set<std::pair<std::size_t, Tuple>> nominal_facts;                // (nominal rel, world classes)
  std::set<std::pair<std::size_t, Tuple>> rigid_facts;                  // (rel, element classes)
  std::set<std::tuple<std::size_t, std::size_t, Tuple>> flex_facts;     // (rel, world class, element classes)

  const std::vector<std::size_t>& worlds() const {
    if (!worlds_) worlds_ = bank.classes([&](std::size_t i) { return bank.node(i).nominal; });
    return *worlds_;
  }
  const std::vector<std::size_t>& rigid_classes(const std::string& sort) const {
    auto it = rigid_classes_.find(sort);
    if (it != rigid_classes_.end()) return it->second;
    return rigid_classes_[sort] = bank.classes([&](std::size_t i) {
      const auto& n = bank.node(i);
      return !n.nominal && n.rigid_sort && n.sort == sort;
    });
  }
  std::vector<std::size_t> flexible_classes(std::size_t world, const std::string& sort) const {
    return bank.classes([&](std::size_t i) {
      const auto& n = bank.node(i);
      return !n.nominal && !n.rigid_sort && n.sort == sort && bank.find(n.children[0]) == world;
    });
  }
  std::vector<std::size_t> carrier(std::size_t world, const std::string& sort) const {
    return sig_.is_rigid_sort(sort) ? rigid_classes(sort) : flexible_classes(world, sort);
  }

  std::optional<std::size_t> eval(const NominalTerm& k, const Env& env) const {
    if (k.is_var()) return env.at(k.symbol);
    Tuple args;
    for (const auto& a : k.args) {
      auto c = eval(a, env);
      if (!c) return std::nullopt;
      args.push_back(*c);
    }
    return bank.lookup(k.symbol, args);
  }

  std::optional<std::size_t> eval(const HybridTerm& t, const Env& env) const {
    if (t.kind == HybridTerm::Kind::Var) return env.at(t.symbol);
    Tuple args;
    if (t.tag) {
      auto w = eval(*t.tag, env);
      if (!w) return std::nullopt;
      args.push_back(*w);
    }
    for (const auto& a : t.args) {
      auto c = eval(a, env);
      if (!c) return std::nullopt;
      args.push_back(*c);
    }
    return bank.lookup(t.symbol, args);
  }

  template <typename Term>
  std::optional<Tuple> eval_all(const std::vector<Term>& terms, const Env& env) const {
    Tuple out;
    for (const auto& t : terms) {
      auto c = eval(t, env);
      if (!c) return std::nullopt;
      out.push_back(*c);
    }
    return out;
  }

  std::size_t nominal_rel_index(const std::string& name) const { return index(sig_.nominal_rels, name); }
  std::size_t rel_index(const std::string& name) const { return index(sig_.rels, name); }

  // Accessibility over world classes, computed from the derived facts.
  const std::map<std::pair<std::size_t, std::size_t>, bool>& action(const Action& a) const {
    auto it = action_cache_.find(a);
    if (it != action_cache_.end()) return it->second;
    const auto ws = worlds();
    std::map<std::size_t, std::size_t> pos;
    for (std::size_t i = 0; i < ws.size(); ++i) pos[ws[i]] = i;
    const WorldRelation r = relation(a, ws, pos);
    std::map<std::pair<std::size_t, std::size_t>, bool> out;
    for (auto [x, y] : r.pairs()) out[{ws[x], ws[y]}] = true;
    return action_cache_.emplace(a, std::move(out)).first->second;
  }

  std::vector<std::size_t> successors(const Action& a, std::size_t world) const {
    std::vector<std::size_t> out;
    for (const auto& [xy, _] : action(a)) {
      if (xy.first == world) out.push_back(xy.second);
    }
    return out;
  }

  // nullopt when some term has no value inside the universe.
  std::optional<bool> holds(const Sentence& g, const Env& env) const {
    using K = Sentence::Kind;
    switch (g.kind) {
      case K::NomEq:
      case K::ActRel: {
        auto a = eval(g.nominals[0], env);
        auto b = eval(g.nominals[1], env);
        if (!a || !b) return std::nullopt;
        if (g.kind == K::NomEq) return *a == *b;
        return action(*g.action).count({*a, *b}) > 0;
      }
      case K::NomRel: {
        auto args = eval_all(g.nominals, env);
        if (!args) return std::nullopt;
        return nominal_facts.count({nominal_rel_index(g.symbol), *args}) > 0;
      }
      case K::HybEq: {
        auto a = eval(g.terms[0], env);
        auto b = eval(g.terms[1], env);
        if (!a || !b) return std::nullopt;
        return *a == *b;
      }
      case K::RigidRel: {
        auto args = eval_all(g.terms, env);
        if (!args) return std::nullopt;
        return rigid_facts.count({rel_index(g.symbol), *args}) > 0;
      }
      case K::FlexRel: {
        auto w = eval(g.index(), env);
        auto args = eval_all(g.terms, env);
        if (!w || !args) return std::nullopt;
        return flex_facts.count({rel_index(g.symbol), *w, *args}) > 0;
      }
      default:
        throw std::logic_error("holds: not an atom or action relation");
    }
  }

  void invalidate() {
    action_cache_.clear();
    worlds_.reset();
    rigid_classes_.clear();
  }

  // Re-canonicalizes stored facts after classes have merged.
  void normalize() {
    auto norm = [&](Tuple t) {
      for (auto& c : t) c = bank.find(c);
      return t;
    };
    std::set<std::pair<std::size_t, Tuple>> nf, rf;
    std::set<std::tuple<std::size_t, std::size_t, Tuple>> ff;
    for (const auto& [r, t] : nominal_facts) nf.emplace(r, norm(t));
    for (const auto& [r, t] : rigid_facts) rf.emplace(r, norm(t));
    for (const auto& [r, w, t] : flex_facts) ff.emplace(r, bank.find(w), norm(t));
    nominal_facts = std::move(nf);
    rigid_facts = std::move(rf);
    flex_facts = std::move(ff);
    invalidate();
  }

  // Every operation is defined on every tuple of classes.
  bool algebra_closed() const {
    const auto ws = worlds();
    for (const auto& f : sig_.nominal_ops) {
      bool total = true;
      for_each_index_tuple(std::vector<std::size_t>(f.arity, ws.size()), [&](const Tuple& idx) {
        Tuple args;
        for (auto i : idx) args.push_back(ws[i]);
        if (!bank.lookup(f.name, args)) total = false;
      });
      if (!total) return false;
    }
    for (const auto& f : sig_.ops) {
      const std::size_t indices = f.rigid ? 1 : ws.size();
      for (std::size_t wi = 0; wi < indices; ++wi) {
        std::vector<std::vector<std::size_t>> choices;
        std::vector<std::size_t> radix;
        for (const auto& a : f.args) {
          choices.push_back(carrier(ws[wi], a));
          radix.push_back(choices.back().size());
        }
        bool total = true;
        for_each_index_tuple(radix, [&](const Tuple& idx) {
          Tuple args;
          if (!f.rigid) args.push_back(ws[wi]);
          for (std::size_t j = 0; j < idx.size(); ++j) args.push_back(choices[j][idx[j]]);
          if (!bank.lookup(f.name, args)) total = false;
        });
        if (!total) return false;
      }
    }
    return true;
  }

 private:
  mutable std::map<Action, std::map<std::pair<std::size_t, std::size_t>, bool>> action_cache_;
  mutable std::optional<std::vector<std::size_t>> worlds_;
  mutable std::map<std::string, std::vector<std::size_t>> rigid_classes_;

  template <typename Decl>
  static std::size_t index(const std::vector<Decl>& decls, const std::string& name) {
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (decls[i].name == name) return i;
    }
    throw Error("undeclared symbol '" + name + "'");
  }

  WorldRelation relation(const Action& a, const std::vector<std::size_t>& ws,
                         const std::map<std::size_t, std::size_t>& pos) const {
    switch (a.kind) {
      case Action::Kind::Modality: {
        WorldRelation r(ws.size());
        const std::size_t rel = nominal_rel_index(a.modality);
        for (const auto& [i, t] : nominal_facts) {
          if (i == rel) r.insert(pos.at(t[0]), pos.at(t[1]));
        }
        return r;
      }
      case Action::Kind::Seq:
        return compose(relation(a.parts[0], ws, pos), relation(a.parts[1], ws, pos));
      case Action::Kind::Union:
        return unite(relation(a.parts[0], ws, pos), relation(a.parts[1], ws, pos));
      case Action::Kind::Star:
        return reflexive_transitive_closure(relation(a.parts[0], ws, pos));
    }
    return WorldRelation(ws.size());
  }
};

namespace {

// Consequences of one round, computed from the round-start state only.
struct Derivation {
  std::vector<std::pair<std::size_t, std::size_t>> unions;
  std::vector<std::pair<std::size_t, Tuple>> nominal_facts;
  std::vector<std::pair<std::size_t, Tuple>> rigid_facts;
  std::vector<std::tuple<std::size_t, std::size_t, Tuple>> flex_facts;
  std::size_t drops = 0;
};

class Saturator {
 public:
  Saturator(const SaturationState& s, Derivation& out) : s_(s), out_(out) {}

  void process(const Sentence& g, std::size_t world, Env& env) {
    using K = Sentence::Kind;
    switch (g.kind) {
      case K::NomEq:
      case K::HybEq: {
        std::optional<std::size_t> a, b;
        if (g.kind == K::NomEq) {
          a = s_.eval(g.nominals[0], env);
          b = s_.eval(g.nominals[1], env);
        } else {
          a = s_.eval(g.terms[0], env);
          b = s_.eval(g.terms[1], env);
        }
        if (!a || !b) return drop();
        if (*a != *b) out_.unions.emplace_back(*a, *b);
        return;
      }
      case K::NomRel: {
        auto args = s_.eval_all(g.nominals, env);
        if (!args) return drop();
        out_.nominal_facts.emplace_back(s_.nominal_rel_index(g.symbol), std::move(*args));
        return;
      }
      case K::RigidRel: {
        auto args = s_.eval_all(g.terms, env);
        if (!args) return drop();
        out_.rigid_facts.emplace_back(s_.rel_index(g.symbol), std::move(*args));
        return;
      }
      case K::FlexRel: {
        auto w = s_.eval(g.index(), env);
        auto args = s_.eval_all(g.terms, env);
        if (!w || !args) return drop();
        out_.flex_facts.emplace_back(s_.rel_index(g.symbol), *w, std::move(*args));
        return;
      }
      case K::At: {
        auto w = s_.eval(g.index(), env);
        if (!w) return drop();
        return process(g.sub(), *w, env);
      }
      case K::Implies:
        for (const auto& h : g.hypotheses) {
          auto v = s_.holds(h, env);
          if (!v) return drop();
          if (!*v) return;
        }
        return process(g.sub(), world, env);
      case K::Store:
        env[g.symbol] = world;
        process(g.sub(), world, env);
        env.erase(g.symbol);
        return;
      case K::Forall:
        return instantiate(g, 0, world, env);
      case K::Nec:
        for (auto v : s_.successors(*g.action, world)) process(g.sub(), v, env);
        return;
      case K::Next: {
        auto w = s_.bank.lookup(g.symbol, {world});
        if (!w) return drop();
        return process(g.sub(), *w, env);
      }
      case K::And:
        for (const auto& b : g.body) process(b, world, env);
        return;
      case K::ActRel:
      case K::Not:
        throw std::logic_error("saturation reached a non-Horn node");
    }
  }

 private:
  const SaturationState& s_;
  Derivation& out_;

  void drop() { ++out_.drops; }

  void instantiate(const Sentence& g, std::size_t i, std::size_t world, Env& env) {
    const VariableBlock& vars = g.vars;
    if (i == vars.size()) {
      process(g.sub(), world, env);
      return;
    }
    const bool nominal = i < vars.nominal.size();
    const std::string& name = nominal ? vars.nominal[i] : vars.rigid[i - vars.nominal.size()].name;
    const std::vector<std::size_t> values =
        nominal ? s_.worlds() : s_.rigid_classes(vars.rigid[i - vars.nominal.size()].sort);
    for (auto v : values) {
      env[name] = v;
      instantiate(g, i + 1, world, env);
    }
    env.erase(name);
  }
};

std::string element_name(const SaturationState& s, std::size_t cls, const std::optional<NominalTerm>& ambient) {
  return print(s.bank.hybrid_term(s.bank.representative(cls)), ambient);
}

constexpr const char* kJunk = "_junk";

}  // namespace

namespace {

// The candidate model (W^Gamma, M^Gamma) read off the current classes and
// facts. Entries that leave the universe are filled with the first element
// of the result carrier, adding a junk element where that carrier is empty.
KripkeModel candidate_model(const SaturationState& s, std::vector<std::size_t>& worlds,
                            std::vector<std::vector<std::vector<std::size_t>>>& classes) {
  const Signature& sig = s.sig_;
  worlds = s.worlds();
  std::vector<std::string> names;
  for (auto w : worlds) names.push_back(print(s.bank.nominal_term(s.bank.representative(w))));

  classes.assign(worlds.size(), std::vector<std::vector<std::size_t>>(sig.sorts.size()));
  std::vector<std::vector<std::vector<std::string>>> carriers(worlds.size(),
                                                              std::vector<std::vector<std::string>>(sig.sorts.size()));
  for (std::size_t wi = 0; wi < worlds.size(); ++wi) {
    const NominalTerm rep = s.bank.nominal_term(s.bank.representative(worlds[wi]));
    for (std::size_t si = 0; si < sig.sorts.size(); ++si) {
      const auto& sort = sig.sorts[si];
      classes[wi][si] = s.carrier(worlds[wi], sort.name);
      for (auto c : classes[wi][si]) {
        carriers[wi][si].push_back(element_name(s, c, sort.rigid ? std::nullopt : std::optional(rep)));
      }
    }
  }
  auto sort_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < sig.sorts.size(); ++i) {
      if (sig.sorts[i].name == name) return i;
    }
    throw Error("undeclared sort '" + name + "'");
  };
  // Junk elements, added until every operation with arguments has a result.
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& f : sig.ops) {
      const std::size_t r = sort_of(f.result);
      for (std::size_t wi = 0; wi < worlds.size(); ++wi) {
        if (!carriers[wi][r].empty()) continue;
        const bool inhabited = std::all_of(f.args.begin(), f.args.end(),
                                           [&](const std::string& a) { return !carriers[wi][sort_of(a)].empty(); });
        if (!inhabited) continue;
        const std::size_t from = sig.sorts[r].rigid ? 0 : wi;
        const std::size_t to = sig.sorts[r].rigid ? worlds.size() : wi + 1;
        for (std::size_t v = from; v < to; ++v) carriers[v][r].push_back(kJunk);
        grew = true;
      }
    }
  }

  KripkeModel m = make_model(sig, names, carriers);
  std::map<std::size_t, std::size_t> world_pos;
  for (std::size_t i = 0; i < worlds.size(); ++i) world_pos[worlds[i]] = i;

  for (std::size_t i = 0; i < sig.nominal_ops.size(); ++i) {
    OpTable& t = m.nominal_ops[i];
    for (std::size_t off = 0; off < t.size(); ++off) {
      Tuple args;
      for (auto a : t.arguments(off)) args.push_back(worlds[a]);
      auto v = s.bank.lookup(sig.nominal_ops[i].name, args);
      t.values[off] = v ? static_cast<std::int64_t>(world_pos.at(*v)) : 0;
    }
  }
  for (const auto& [r, tuple] : s.nominal_facts) {
    Tuple args;
    for (auto c : tuple) args.push_back(world_pos.at(c));
    m.nominal_rels[r].insert(args);
  }

  for (std::size_t wi = 0; wi < worlds.size(); ++wi) {
    LocalModel& local = m.locals[wi];
    std::vector<std::map<std::size_t, std::size_t>> pos(sig.sorts.size());
    for (std::size_t si = 0; si < sig.sorts.size(); ++si) {
      for (std::size_t e = 0; e < classes[wi][si].size(); ++e) pos[si][classes[wi][si][e]] = e;
    }
    for (std::size_t i = 0; i < sig.ops.size(); ++i) {
      const DataOp& f = sig.ops[i];
      OpTable& t = local.ops[i];
      const std::size_t r = sort_of(f.result);
      for (std::size_t off = 0; off < t.size(); ++off) {
        const auto idx = t.arguments(off);
        Tuple args;
        if (!f.rigid) args.push_back(worlds[wi]);
        bool junk_arg = false;
        for (std::size_t j = 0; j < idx.size(); ++j) {
          const auto& cs = classes[wi][sort_of(f.args[j])];
          if (idx[j] >= cs.size()) {
            junk_arg = true;
            break;
          }
          args.push_back(cs[idx[j]]);
        }
        std::optional<std::size_t> v;
        if (!junk_arg) v = s.bank.lookup(f.name, args);
        t.values[off] = v ? static_cast<std::int64_t>(pos[r].at(*v)) : 0;
      }
    }
    for (const auto& [r, tuple] : s.rigid_facts) {
      Tuple args;
      for (std::size_t j = 0; j < tuple.size(); ++j) args.push_back(pos[sort_of(sig.rels[r].args[j])].at(tuple[j]));
      local.rels[r].insert(args);
    }
    for (const auto& [r, w, tuple] : s.flex_facts) {
      if (w != worlds[wi]) continue;
      Tuple args;
      for (std::size_t j = 0; j < tuple.size(); ++j) args.push_back(pos[sort_of(sig.rels[r].args[j])].at(tuple[j]));
      local.rels[r].insert(args);
    }
  }
  return m;
}

// Gamma_0 presented on representatives: every relation fact, and for every
// non-representative term whose immediate subterms are representatives, its
// equation with the representative of its class.
std::vector<Sentence> atom_base(const SaturationState& s) {
  const Signature& sig = s.sig_;
  const TermBank& bank = s.bank;
  std::set<Sentence> out;
  auto rep_nom = [&](std::size_t c) { return bank.nominal_term(bank.representative(c)); };
  auto rep_hyb = [&](std::size_t c) { return bank.hybrid_term(bank.representative(c)); };
  const auto worlds = s.worlds();
  const NominalTerm least_world = rep_nom(worlds.front());

  for (std::size_t i = 0; i < bank.size(); ++i) {
    const auto& n = bank.node(i);
    if (bank.representative(i) == i) continue;
    const bool children_are_reps = std::all_of(n.children.begin(), n.children.end(),
                                               [&](std::size_t c) { return bank.representative(c) == c; });
    if (!children_are_reps) continue;
    if (n.nominal) {
      out.insert(nom_eq(bank.nominal_term(i), rep_nom(i)));
    } else {
      const NominalTerm index = n.rigid_sort ? least_world : rep_nom(n.children[0]);
      out.insert(hyb_eq(index, n.sort, bank.hybrid_term(i), rep_hyb(i)));
    }
  }
  for (const auto& [r, tuple] : s.nominal_facts) {
    std::vector<NominalTerm> args;
    for (auto c : tuple) args.push_back(rep_nom(c));
    out.insert(nom_rel(sig.nominal_rels[r].name, std::move(args)));
  }
  for (const auto& [r, tuple] : s.rigid_facts) {
    std::vector<HybridTerm> args;
    for (auto c : tuple) args.push_back(rep_hyb(c));
    out.insert(rigid_rel(sig.rels[r].name, std::move(args)));
  }
  for (const auto& [r, w, tuple] : s.flex_facts) {
    std::vector<HybridTerm> args;
    for (auto c : tuple) args.push_back(rep_hyb(c));
    out.insert(flex_rel(sig.rels[r].name, rep_nom(w), std::move(args)));
  }
  return {out.begin(), out.end()};
}

}  // namespace

SaturationResult saturate(const Signature& sig, const std::vector<HornClause>& gamma, std::size_t depth,
                          const SaturationOptions& options) {
  Theory theory{sig, gamma};
  if (auto diags = validate_theory(theory); !diags.empty()) throw Error(std::move(diags));

  SaturationResult result;
  result.depth = depth;
  result.universe = build_term_universe(sig, depth);
  auto state = std::make_shared<SaturationState>(sig, result.universe);
  SaturationState& s = *state;

  bool changed = true;
  std::size_t drops = 0;
  std::size_t round = 0;
  while (changed && round < options.round_limit) {
    ++round;
    Derivation d;
    Saturator sat(s, d);
    const auto worlds = s.worlds();
    for (const auto& g : gamma) {
      for (auto w : worlds) {
        Env env;
        sat.process(g, w, env);
      }
    }
    drops = d.drops;
    changed = false;
    for (auto [a, b] : d.unions) changed |= s.bank.unite(a, b);
    if (changed) s.bank.close();
    s.normalize();
    auto norm = [&](Tuple t) {
      for (auto& c : t) c = s.bank.find(c);
      return t;
    };
    for (auto& [r, t] : d.nominal_facts) changed |= s.nominal_facts.emplace(r, norm(t)).second;
    for (auto& [r, t] : d.rigid_facts) changed |= s.rigid_facts.emplace(r, norm(t)).second;
    for (auto& [r, w, t] : d.flex_facts) changed |= s.flex_facts.emplace(r, s.bank.find(w), norm(t)).second;
    s.invalidate();
  }
  result.rounds = round;

  const bool closed = s.algebra_closed();
  result.status = (!changed && drops == 0 && closed) ? SaturationStatus::Fixpoint : SaturationStatus::BoundExhausted;
  result.universe.completeness =
      closed ? TermUniverse::Completeness::Exact : TermUniverse::Completeness::Truncated;

  std::vector<std::size_t> worlds;
  std::vector<std::vector<std::vector<std::size_t>>> classes;
  result.model = candidate_model(s, worlds, classes);
  result.atom_base = atom_base(s);
  for (auto w : worlds) result.world_representatives.push_back(s.bank.nominal_term(s.bank.representative(w)));
  for (const auto& sort : sig.sorts) {
    if (!sort.rigid) continue;
    auto& reps = result.element_representatives[sort.name];
    for (auto c : s.rigid_classes(sort.name)) reps.push_back(s.bank.hybrid_term(s.bank.representative(c)));
  }
  result.state = std::move(state);
  return result;
}

std::pair<KripkeModel, SaturationResult> build_initial_model(const Signature& sig, const std::vector<HornClause>& gamma,
                                                             std::size_t depth, const SaturationOptions& options) {
  SaturationResult result = saturate(sig, gamma, depth, options);
  if (result.status == SaturationStatus::Fixpoint) {
    for (const auto& g : gamma) {
      if (!satisfies_everywhere(result.model, g)) {
        throw std::logic_error("initial model fails clause '" + print(g) + "'");
      }
    }
  }
  return {result.model, std::move(result)};
}

bool entails_atom(const SaturationResult& result, const Sentence& rho) {
  if (!rho.is_atom_or_action()) throw Error("entails_atom expects an atomic sentence or action relation");
  return result.state->holds(rho, {}).value_or(false);
}

std::optional<NominalTerm> canonical_form(const SaturationResult& result, const NominalTerm& k) {
  const SaturationState& s = *result.state;
  auto c = s.eval(k, {});
  if (!c) return std::nullopt;
  return s.bank.nominal_term(s.bank.representative(*c));
}

std::optional<HybridTerm> canonical_form(const SaturationResult& result, const HybridTerm& t) {
  const SaturationState& s = *result.state;
  auto c = s.eval(t, {});
  if (!c) return std::nullopt;
  return s.bank.hybrid_term(s.bank.representative(*c));
}

std::optional<std::size_t> NominalCongruence::class_index(const NominalTerm& k) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == k) return class_of[i];
  }
  return std::nullopt;
}

NominalQuotient nominal_congruence_closure(const TermUniverse& u, const std::vector<Sentence>& equations,
                                           const std::vector<Sentence>& relations) {
  TermBank bank(u);
  for (const auto& e : equations) {
    if (e.kind != Sentence::Kind::NomEq) throw Error("nominal closure expects nominal equations");
    auto a = bank.node_of(e.nominals[0]);
    auto b = bank.node_of(e.nominals[1]);
    if (a && b) bank.unite(*a, *b);
  }
  bank.close();

  NominalQuotient q;
  NominalCongruence& c = q.congruence;
  std::vector<std::size_t> roots = bank.classes([&](std::size_t i) { return bank.node(i).nominal; });
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    pos[roots[i]] = i;
    c.representatives.push_back(bank.nominal_term(bank.representative(roots[i])));
  }
  for (std::size_t i = 0; i < bank.nominal_count(); ++i) {
    c.terms.push_back(bank.nominal_term(i));
    c.class_of.push_back(pos.at(bank.find(i)));
  }
  const Signature& sig = u.signature;
  const std::size_t n = roots.size();
  for (const auto& f : sig.nominal_ops) {
    OpTable t = OpTable::make(std::vector<std::size_t>(f.arity, n));
    for (std::size_t off = 0; off < t.size(); ++off) {
      Tuple args;
      for (auto a : t.arguments(off)) args.push_back(roots[a]);
      if (auto v = bank.lookup(f.name, args)) t.values[off] = static_cast<std::int64_t>(pos.at(*v));
    }
    q.ops.push_back(std::move(t));
  }
  for (const auto& r : sig.nominal_rels) q.rels.push_back(RelTable::make(std::vector<std::size_t>(r.arity, n)));
  for (const auto& r : relations) {
    if (r.kind != Sentence::Kind::NomRel) throw Error("nominal closure expects nominal relation atoms");
    std::size_t ri = 0;
    while (sig.nominal_rels[ri].name != r.symbol) ++ri;
    Tuple args;
    bool inside = true;
    for (const auto& k : r.nominals) {
      auto node = bank.node_of(k);
      if (!node) {
        inside = false;
        break;
      }
      args.push_back(pos.at(bank.find(*node)));
    }
    if (inside) q.rels[ri].insert(args);
  }
  return q;
}

std::optional<std::size_t> HybridCongruence::class_index(World w, const std::string& sort, const HybridTerm& t) const {
  auto it = classes.at(w).find(sort);
  if (it == classes.at(w).end()) return std::nullopt;
  for (std::size_t i = 0; i < it->second.size(); ++i) {
    if (std::find(it->second[i].begin(), it->second[i].end(), t) != it->second[i].end()) return i;
  }
  return std::nullopt;
}

bool HybridCongruence::congruent(World w, const std::string& sort, const HybridTerm& a, const HybridTerm& b) const {
  auto x = class_index(w, sort, a);
  return x && x == class_index(w, sort, b);
}

HybridCongruence hybrid_congruence_closure(const NominalQuotient& worlds, const TermUniverse& u,
                                           const std::vector<Sentence>& equations) {
  TermBank bank(u);
  const NominalCongruence& nc = worlds.congruence;
  for (std::size_t i = 0; i < nc.terms.size(); ++i) {
    auto rep = bank.node_of(nc.representatives[nc.class_of[i]]);
    auto node = bank.node_of(nc.terms[i]);
    if (rep && node) bank.unite(*rep, *node);
  }
  for (const auto& e : equations) {
    if (e.kind != Sentence::Kind::HybEq) throw Error("hybrid closure expects hybrid equations");
    auto a = bank.node_of(e.terms[0]);
    auto b = bank.node_of(e.terms[1]);
    if (a && b) bank.unite(*a, *b);
  }
  bank.close();

  const Signature& sig = u.signature;
  HybridCongruence out;
  out.classes.resize(nc.class_count());
  for (std::size_t w = 0; w < nc.class_count(); ++w) {
    const std::size_t world_root = bank.find(*bank.node_of(nc.representatives[w]));
    for (const auto& sort : sig.sorts) {
      std::map<std::size_t, std::vector<HybridTerm>> by_root;
      std::vector<std::size_t> order;
      for (std::size_t i = bank.nominal_count(); i < bank.size(); ++i) {
        const auto& n = bank.node(i);
        if (n.sort != sort.name) continue;
        if (!n.rigid_sort && bank.find(n.children[0]) != world_root) continue;
        const std::size_t root = bank.find(i);
        if (!by_root.count(root)) order.push_back(root);
        by_root[root].push_back(bank.hybrid_term(i));
      }
      auto& list = out.classes[w][sort.name];
      for (auto root : order) list.push_back(std::move(by_root[root]));
    }
  }
  return out;
}

ModelCongruence generate_congruence(const KripkeModel& m, const std::vector<GeneratorPair>& pairs) {
  const Signature& sig = m.signature;
  const std::size_t n = m.worlds.size();
  // Flatten (world, sort, element) to ids; rigid sorts share world 0's ids.
  std::vector<std::vector<std::size_t>> base(n, std::vector<std::size_t>(sig.sorts.size()));
  std::size_t count = 0;
  for (World w = 0; w < n; ++w) {
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      if (sig.sorts[s].rigid && w > 0) {
        base[w][s] = base[0][s];
        continue;
      }
      base[w][s] = count;
      count += m.locals[w].carriers[s].size();
    }
  }
  UnionFind uf(count);
  for (const auto& p : pairs) {
    const std::size_t s = m.sort_index(p.sort);
    uf.unite(base[p.world][s] + p.a, base[p.world][s] + p.b);
  }
  for (bool merged = true; merged;) {
    merged = false;
    for (World w = 0; w < n; ++w) {
      for (std::size_t i = 0; i < sig.ops.size(); ++i) {
        const DataOp& f = sig.ops[i];
        const OpTable& t = m.locals[w].ops[i];
        const std::size_t r = m.sort_index(f.result);
        std::map<Tuple, std::size_t> seen;
        for (std::size_t off = 0; off < t.size(); ++off) {
          const auto args = t.arguments(off);
          Tuple key;
          for (std::size_t j = 0; j < args.size(); ++j) key.push_back(uf.find(base[w][m.sort_index(f.args[j])] + args[j]));
          const std::size_t value = base[w][r] + static_cast<std::size_t>(t.values[off]);
          auto [it, inserted] = seen.emplace(key, value);
          if (!inserted && uf.unite(it->second, value)) merged = true;
        }
      }
    }
  }
  ModelCongruence c;
  c.class_of.assign(n, std::vector<std::vector<std::size_t>>(sig.sorts.size()));
  for (World w = 0; w < n; ++w) {
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      std::map<std::size_t, std::size_t> dense;
      for (Element e = 0; e < m.locals[w].carriers[s].size(); ++e) {
        const std::size_t root = uf.find(base[w][s] + e);
        auto it = dense.emplace(root, dense.size()).first;
        c.class_of[w][s].push_back(it->second);
      }
    }
  }
  return c;
}

Diagnostics validate_congruence(const KripkeModel& m, const ModelCongruence& c) {
  Diagnostics diags;
  const Signature& sig = m.signature;
  if (c.class_of.size() != m.worlds.size()) return {{"congruence does not cover every world", {}}};
  for (World w = 0; w < m.worlds.size(); ++w) {
    if (c.class_of[w].size() != sig.sorts.size()) return {{"congruence does not cover every sort", {}}};
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      if (c.class_of[w][s].size() != m.locals[w].carriers[s].size()) {
        return {{"congruence does not cover the carrier of '" + sig.sorts[s].name + "'", {}}};
      }
      if (sig.sorts[s].rigid && c.class_of[w][s] != c.class_of[0][s]) {
        diags.push_back({"rigid-sort agreement violated on '" + sig.sorts[s].name + "'", {}});
      }
    }
  }
  for (World w = 0; w < m.worlds.size(); ++w) {
    for (std::size_t i = 0; i < sig.ops.size(); ++i) {
      const DataOp& f = sig.ops[i];
      const OpTable& t = m.locals[w].ops[i];
      const std::size_t r = m.sort_index(f.result);
      std::map<Tuple, std::size_t> seen;
      for (std::size_t off = 0; off < t.size(); ++off) {
        const auto args = t.arguments(off);
        Tuple key;
        for (std::size_t j = 0; j < args.size(); ++j) key.push_back(c.class_of[w][m.sort_index(f.args[j])][args[j]]);
        const std::size_t value = c.class_of[w][r][static_cast<std::size_t>(t.values[off])];
        auto [it, inserted] = seen.emplace(key, value);
        if (!inserted && it->second != value) {
          diags.push_back({"congruence is not compatible with '" + f.name + "' at world '" + m.worlds[w] + "'", {}});
          break;
        }
      }
    }
  }
  return diags;
}

std::pair<KripkeModel, KripkeHomomorphism> quotient_model(const KripkeModel& m, const ModelCongruence& c) {
  if (auto diags = validate_congruence(m, c); !diags.empty()) throw Error(std::move(diags));
  const Signature& sig = m.signature;
  const std::size_t n = m.worlds.size();
  // Each class is named after its least member.
  std::vector<std::vector<std::vector<std::string>>> carriers(n, std::vector<std::vector<std::string>>(sig.sorts.size()));
  for (World w = 0; w < n; ++w) {
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      const auto& cls = c.class_of[w][s];
      const std::size_t k = cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
      carriers[w][s].assign(k, std::string());
      for (Element e = cls.size(); e-- > 0;) carriers[w][s][cls[e]] = m.locals[w].carriers[s][e];
    }
  }
  KripkeModel q = make_model(sig, m.worlds, carriers);
  q.nominal_ops = m.nominal_ops;
  q.nominal_rels = m.nominal_rels;
  for (World w = 0; w < n; ++w) {
    const auto& cls = c.class_of[w];
    auto image = [&](std::vector<std::size_t> args, const std::vector<std::string>& sorts) {
      for (std::size_t j = 0; j < args.size(); ++j) args[j] = cls[m.sort_index(sorts[j])][args[j]];
      return args;
    };
    for (std::size_t i = 0; i < sig.ops.size(); ++i) {
      const OpTable& t = m.locals[w].ops[i];
      const std::size_t r = m.sort_index(sig.ops[i].result);
      for (std::size_t off = 0; off < t.size(); ++off) {
        q.locals[w].ops[i].set(image(t.arguments(off), sig.ops[i].args), cls[r][static_cast<std::size_t>(t.values[off])]);
      }
    }
    for (std::size_t i = 0; i < sig.rels.size(); ++i) {
      const RelTable& t = m.locals[w].rels[i];
      for (std::size_t off = 0; off < t.size(); ++off) {
        if (t.bits[off]) q.locals[w].rels[i].insert(image(t.arguments(off), sig.rels[i].args));
      }
    }
  }
  KripkeHomomorphism h;
  for (World w = 0; w < n; ++w) h.world_map.push_back(w);
  h.local_maps = c.class_of;
  return {std::move(q), std::move(h)};
}

}  // namespace hdfol
