#include "hdfol/kripke.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace hdfol {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::size_t row_major_offset(const std::vector<std::size_t>& dims, std::span<const std::size_t> args) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) off = off * dims[i] + args[i];
  return off;
}

std::vector<std::size_t> row_major_arguments(const std::vector<std::size_t>& dims, std::size_t off) {
  std::vector<std::size_t> args(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    args[i] = off % dims[i];
    off /= dims[i];
  }
  return args;
}

template <typename Decl>
std::size_t index_of(const std::vector<Decl>& decls, std::string_view name) {
  for (std::size_t i = 0; i < decls.size(); ++i) {
    if (decls[i].name == name) return i;
  }
  throw Error("undeclared symbol '" + std::string(name) + "'");
}

}  // namespace

OpTable OpTable::make(std::vector<std::size_t> dims) {
  OpTable t;
  t.values.assign(product(dims), kUndefined);
  t.dims = std::move(dims);
  return t;
}

std::size_t OpTable::offset(std::span<const std::size_t> args) const { return row_major_offset(dims, args); }
std::vector<std::size_t> OpTable::arguments(std::size_t off) const { return row_major_arguments(dims, off); }

RelTable RelTable::make(std::vector<std::size_t> dims) {
  RelTable t;
  t.bits.assign(product(dims), 0);
  t.dims = std::move(dims);
  return t;
}

std::size_t RelTable::offset(std::span<const std::size_t> args) const { return row_major_offset(dims, args); }
std::vector<std::size_t> RelTable::arguments(std::size_t off) const { return row_major_arguments(dims, off); }

std::optional<World> KripkeModel::find_world(std::string_view name) const {
  for (World w = 0; w < worlds.size(); ++w) {
    if (worlds[w] == name) return w;
  }
  return std::nullopt;
}

std::size_t KripkeModel::sort_index(std::string_view sort) const { return index_of(signature.sorts, sort); }

const std::vector<std::string>& KripkeModel::carrier(World w, std::string_view sort) const {
  return locals.at(w).carriers.at(sort_index(sort));
}

KripkeModel make_model(const Signature& sig, std::vector<std::string> worlds,
                       const std::vector<std::vector<std::vector<std::string>>>& carriers) {
  KripkeModel m;
  m.signature = sig;
  m.worlds = std::move(worlds);
  const std::size_t n = m.worlds.size();
  for (const auto& f : sig.nominal_ops) m.nominal_ops.push_back(OpTable::make(std::vector<std::size_t>(f.arity, n)));
  for (const auto& r : sig.nominal_rels) m.nominal_rels.push_back(RelTable::make(std::vector<std::size_t>(r.arity, n)));
  m.locals.resize(n);
  for (World w = 0; w < n; ++w) {
    LocalModel& local = m.locals[w];
    local.carriers.resize(sig.sorts.size());
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      const World source = sig.sorts[s].rigid ? 0 : w;
      if (source < carriers.size() && s < carriers[source].size()) local.carriers[s] = carriers[source][s];
    }
    auto size_of = [&](const std::string& sort) { return local.carriers[index_of(sig.sorts, sort)].size(); };
    for (const auto& f : sig.ops) {
      std::vector<std::size_t> dims;
      for (const auto& a : f.args) dims.push_back(size_of(a));
      local.ops.push_back(OpTable::make(std::move(dims)));
    }
    for (const auto& r : sig.rels) {
      std::vector<std::size_t> dims;
      for (const auto& a : r.args) dims.push_back(size_of(a));
      local.rels.push_back(RelTable::make(std::move(dims)));
    }
  }
  return m;
}

Diagnostics validate_model(const Signature& sig, const KripkeModel& m) {
  Diagnostics diags;
  auto report = [&](std::string msg) { diags.push_back({std::move(msg), {}}); };
  if (m.signature != sig) report("model is not over the expected signature");
  if (m.worlds.empty()) report("empty world set");
  if (std::set<std::string>(m.worlds.begin(), m.worlds.end()).size() != m.worlds.size()) report("duplicate world name");
  if (!diags.empty()) return diags;

  const std::size_t n = m.worlds.size();
  if (m.nominal_ops.size() != sig.nominal_ops.size() || m.nominal_rels.size() != sig.nominal_rels.size() ||
      m.locals.size() != n) {
    report("model tables do not match the signature");
    return diags;
  }
  for (std::size_t i = 0; i < sig.nominal_ops.size(); ++i) {
    const OpTable& t = m.nominal_ops[i];
    if (t.dims != std::vector<std::size_t>(sig.nominal_ops[i].arity, n)) {
      report("nominal operation '" + sig.nominal_ops[i].name + "' has a malformed table");
      continue;
    }
    for (auto v : t.values) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) {
        report("partial function: nominal operation '" + sig.nominal_ops[i].name + "' is not total");
        break;
      }
    }
  }
  for (std::size_t i = 0; i < sig.nominal_rels.size(); ++i) {
    if (m.nominal_rels[i].dims != std::vector<std::size_t>(sig.nominal_rels[i].arity, n)) {
      report("nominal relation '" + sig.nominal_rels[i].name + "' has a malformed table");
    }
  }

  for (World w = 0; w < n; ++w) {
    const LocalModel& local = m.locals[w];
    const std::string at = " at world '" + m.worlds[w] + "'";
    if (local.carriers.size() != sig.sorts.size() || local.ops.size() != sig.ops.size() ||
        local.rels.size() != sig.rels.size()) {
      report("local model" + at + " does not match the signature");
      continue;
    }
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      const auto& c = local.carriers[s];
      if (std::set<std::string>(c.begin(), c.end()).size() != c.size()) {
        report("duplicate element in carrier of '" + sig.sorts[s].name + "'" + at);
      }
    }
    auto size_of = [&](const std::string& sort) { return local.carriers[index_of(sig.sorts, sort)].size(); };
    for (std::size_t i = 0; i < sig.ops.size(); ++i) {
      const DataOp& f = sig.ops[i];
      const OpTable& t = local.ops[i];
      std::vector<std::size_t> dims;
      for (const auto& a : f.args) dims.push_back(size_of(a));
      if (t.dims != dims || t.values.size() != product(dims)) {
        report("operation '" + f.name + "' has a malformed table" + at);
        continue;
      }
      for (auto v : t.values) {
        if (v < 0 || static_cast<std::size_t>(v) >= size_of(f.result)) {
          report("partial function: operation '" + f.name + "' is not total" + at);
          break;
        }
      }
    }
    for (std::size_t i = 0; i < sig.rels.size(); ++i) {
      std::vector<std::size_t> dims;
      for (const auto& a : sig.rels[i].args) dims.push_back(size_of(a));
      if (local.rels[i].dims != dims || local.rels[i].bits.size() != product(dims)) {
        report("relation '" + sig.rels[i].name + "' has a malformed table" + at);
      }
    }
  }
  if (!diags.empty()) return diags;

  for (World w = 1; w < n; ++w) {
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      if (sig.sorts[s].rigid && m.locals[w].carriers[s] != m.locals[0].carriers[s]) {
        report("rigid symbol varies: carrier of '" + sig.sorts[s].name + "' differs between worlds");
      }
    }
    for (std::size_t i = 0; i < sig.ops.size(); ++i) {
      if (sig.ops[i].rigid && m.locals[w].ops[i] != m.locals[0].ops[i]) {
        report("rigid symbol varies: operation '" + sig.ops[i].name + "' differs between worlds");
      }
    }
    for (std::size_t i = 0; i < sig.rels.size(); ++i) {
      if (sig.rels[i].rigid && m.locals[w].rels[i] != m.locals[0].rels[i]) {
        report("rigid symbol varies: relation '" + sig.rels[i].name + "' differs between worlds");
      }
    }
  }
  return diags;
}

WorldRelation WorldRelation::identity(std::size_t worlds) {
  WorldRelation r(worlds);
  for (World w = 0; w < worlds; ++w) r.insert(w, w);
  return r;
}

std::vector<std::pair<World, World>> WorldRelation::pairs() const {
  std::vector<std::pair<World, World>> out;
  for (World a = 0; a < n; ++a) {
    for (World b = 0; b < n; ++b) {
      if (contains(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<World> WorldRelation::successors(World a) const {
  std::vector<World> out;
  for (World b = 0; b < n; ++b) {
    if (contains(a, b)) out.push_back(b);
  }
  return out;
}

WorldRelation compose(const WorldRelation& a, const WorldRelation& b) {
  WorldRelation out(a.n);
  for (World x = 0; x < a.n; ++x) {
    for (World y = 0; y < a.n; ++y) {
      if (!a.contains(x, y)) continue;
      for (World z = 0; z < a.n; ++z) {
        if (b.contains(y, z)) out.insert(x, z);
      }
    }
  }
  return out;
}

WorldRelation unite(const WorldRelation& a, const WorldRelation& b) {
  WorldRelation out = a;
  for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] |= b.bits[i];
  return out;
}

// Breadth-first search from every world.
WorldRelation reflexive_transitive_closure(const WorldRelation& r) {
  WorldRelation out(r.n);
  for (World start = 0; start < r.n; ++start) {
    std::deque<World> queue{start};
    out.insert(start, start);
    while (!queue.empty()) {
      World x = queue.front();
      queue.pop_front();
      for (World y = 0; y < r.n; ++y) {
        if (r.contains(x, y) && !out.contains(start, y)) {
          out.insert(start, y);
          queue.push_back(y);
        }
      }
    }
  }
  return out;
}

namespace {

class Evaluator {
 public:
  Evaluator(const KripkeModel& m, Assignment env) : m_(m), env_(std::move(env)) {}

  World nominal(const NominalTerm& k) {
    if (k.is_var()) {
      if (auto it = env_.nominal.find(k.symbol); it != env_.nominal.end()) return it->second;
    }
    const std::size_t f = index_of(m_.signature.nominal_ops, k.symbol);
    std::vector<std::size_t> args;
    for (const auto& a : k.args) args.push_back(nominal(a));
    const std::int64_t v = m_.nominal_ops[f].at(args);
    if (v < 0) throw Error("nominal operation '" + k.symbol + "' is undefined on its arguments");
    return static_cast<World>(v);
  }

  Element hybrid(const HybridTerm& t) {
    if (t.kind == HybridTerm::Kind::Var) {
      if (auto it = env_.rigid.find(t.symbol); it != env_.rigid.end()) return it->second;
    }
    const std::size_t f = index_of(m_.signature.ops, t.symbol);
    const World w = t.kind == HybridTerm::Kind::Flex ? nominal(*t.tag) : 0;
    std::vector<std::size_t> args;
    for (const auto& a : t.args) args.push_back(hybrid(a));
    const std::int64_t v = m_.locals[w].ops[f].at(args);
    if (v < 0) throw Error("operation '" + t.symbol + "' is undefined on its arguments");
    return static_cast<Element>(v);
  }

  const WorldRelation& action(const Action& a) {
    if (auto it = actions_.find(a); it != actions_.end()) return it->second;
    WorldRelation r(m_.worlds.size());
    switch (a.kind) {
      case Action::Kind::Modality: {
        const std::size_t i = index_of(m_.signature.nominal_rels, a.modality);
        if (m_.signature.nominal_rels[i].arity != 2) throw Error("'" + a.modality + "' is not a binary nominal relation");
        const RelTable& t = m_.nominal_rels[i];
        for (std::size_t off = 0; off < t.bits.size(); ++off) {
          if (t.bits[off]) {
            auto xy = t.arguments(off);
            r.insert(xy[0], xy[1]);
          }
        }
        break;
      }
      case Action::Kind::Seq:
        r = compose(action(a.parts[0]), action(a.parts[1]));
        break;
      case Action::Kind::Union:
        r = unite(action(a.parts[0]), action(a.parts[1]));
        break;
      case Action::Kind::Star:
        r = reflexive_transitive_closure(action(a.parts[0]));
        break;
    }
    return actions_.emplace(a, std::move(r)).first->second;
  }

  bool holds(World w, const Sentence& g) {
    using K = Sentence::Kind;
    switch (g.kind) {
      case K::NomEq:
        return nominal(g.nominals[0]) == nominal(g.nominals[1]);
      case K::NomRel: {
        std::vector<std::size_t> args;
        for (const auto& k : g.nominals) args.push_back(nominal(k));
        return m_.nominal_rels[index_of(m_.signature.nominal_rels, g.symbol)].contains(args);
      }
      case K::HybEq:
        return hybrid(g.terms[0]) == hybrid(g.terms[1]);
      case K::RigidRel:
      case K::FlexRel: {
        const World at = g.kind == K::FlexRel ? nominal(g.index()) : w;
        std::vector<std::size_t> args;
        for (const auto& t : g.terms) args.push_back(hybrid(t));
        return m_.locals[at].rels[index_of(m_.signature.rels, g.symbol)].contains(args);
      }
      case K::ActRel:
        return action(*g.action).contains(nominal(g.nominals[0]), nominal(g.nominals[1]));
      case K::At:
        return holds(nominal(g.index()), g.sub());
      case K::Not:
        return !holds(w, g.sub());
      case K::And:
        return std::all_of(g.body.begin(), g.body.end(), [&](const Sentence& b) { return holds(w, b); });
      case K::Implies:
        for (const auto& h : g.hypotheses) {
          if (!holds(w, h)) return true;
        }
        return holds(w, g.sub());
      case K::Store: {
        auto saved = env_.nominal;
        env_.nominal[g.symbol] = w;
        const bool result = holds(w, g.sub());
        env_.nominal = std::move(saved);
        return result;
      }
      case K::Forall: {
        const Assignment saved = env_;
        bool result = true;
        for_each_assignment(m_, g.vars, [&](const Assignment& values) {
          for (const auto& [z, v] : values.nominal) env_.nominal[z] = v;
          for (const auto& [x, e] : values.rigid) env_.rigid[x] = e;
          result = holds(w, g.sub());
          return result;
        });
        env_ = saved;
        return result;
      }
      case K::Nec:
        for (World v : action(*g.action).successors(w)) {
          if (!holds(v, g.sub())) return false;
        }
        return true;
      case K::Next: {
        const std::size_t f = index_of(m_.signature.nominal_ops, g.symbol);
        const std::size_t arg[] = {w};
        return holds(static_cast<World>(m_.nominal_ops[f].at(arg)), g.sub());
      }
    }
    return false;
  }

 private:
  const KripkeModel& m_;
  Assignment env_;
  std::map<Action, WorldRelation> actions_;
};

}  // namespace

World interpret_nominal_term(const KripkeModel& m, const NominalTerm& k, const Assignment& env) {
  return Evaluator(m, env).nominal(k);
}

Element interpret_hybrid_term(const KripkeModel& m, const HybridTerm& t, const Assignment& env) {
  return Evaluator(m, env).hybrid(t);
}

WorldRelation interpret_action(const KripkeModel& m, const Action& a) { return Evaluator(m, {}).action(a); }

bool satisfies(const KripkeModel& m, World w, const Sentence& g, const Assignment& env) {
  return Evaluator(m, env).holds(w, g);
}

bool satisfies_everywhere(const KripkeModel& m, const Sentence& g) {
  Evaluator eval(m, {});
  for (World w = 0; w < m.worlds.size(); ++w) {
    if (!eval.holds(w, g)) return false;
  }
  return true;
}

KripkeModel reduct_along_morphism(const SignatureMorphism& phi, const KripkeModel& m) {
  const Signature& src = phi.source;
  const Signature& dst = m.signature;
  KripkeModel out;
  out.signature = src;
  out.worlds = m.worlds;
  for (const auto& f : src.nominal_ops) out.nominal_ops.push_back(m.nominal_ops[index_of(dst.nominal_ops, phi.nominal(f.name))]);
  for (const auto& r : src.nominal_rels) out.nominal_rels.push_back(m.nominal_rels[index_of(dst.nominal_rels, phi.nominal(r.name))]);
  for (const auto& local : m.locals) {
    LocalModel l;
    for (const auto& s : src.sorts) l.carriers.push_back(local.carriers[index_of(dst.sorts, phi.sort(s.name))]);
    for (const auto& f : src.ops) l.ops.push_back(local.ops[index_of(dst.ops, phi.op(f.name))]);
    for (const auto& r : src.rels) l.rels.push_back(local.rels[index_of(dst.rels, phi.rel(r.name))]);
    out.locals.push_back(std::move(l));
  }
  return out;
}

KripkeModel expand(const KripkeModel& m, const VariableBlock& vars, const Assignment& values) {
  KripkeModel out = m;
  out.signature = extend_with_variables(m.signature, vars);
  for (const auto& z : vars.nominal) {
    OpTable t = OpTable::make({});
    t.set({}, values.nominal.at(z));
    out.nominal_ops.push_back(std::move(t));
  }
  for (auto& local : out.locals) {
    for (const auto& x : vars.rigid) {
      OpTable t = OpTable::make({});
      t.set({}, values.rigid.at(x.name));
      local.ops.push_back(std::move(t));
    }
  }
  return out;
}

KripkeModel reduct_along_substitution(const Substitution& theta, const KripkeModel& m) {
  Assignment values;
  for (const auto& z : theta.domain.nominal) values.nominal[z] = interpret_nominal_term(m, theta.image(nom_var(z)));
  for (const auto& x : theta.domain.rigid) {
    values.rigid[x.name] = interpret_hybrid_term(m, theta.image(data_var(x.name, x.sort)));
  }

  // Forget the constants standing for the codomain variables.
  KripkeModel base = m;
  Signature& sig = base.signature;
  for (std::size_t i = sig.nominal_ops.size(); i-- > 0;) {
    if (sig.nominal_ops[i].arity == 0 && theta.codomain.has_nominal(sig.nominal_ops[i].name)) {
      sig.nominal_ops.erase(sig.nominal_ops.begin() + static_cast<std::ptrdiff_t>(i));
      base.nominal_ops.erase(base.nominal_ops.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  for (std::size_t i = sig.ops.size(); i-- > 0;) {
    if (sig.ops[i].args.empty() && theta.codomain.rigid_sort(sig.ops[i].name)) {
      sig.ops.erase(sig.ops.begin() + static_cast<std::ptrdiff_t>(i));
      for (auto& local : base.locals) local.ops.erase(local.ops.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  return expand(base, theta.domain, values);
}

void for_each_assignment(const KripkeModel& m, const VariableBlock& vars,
                         const std::function<bool(const Assignment&)>& visit) {
  std::vector<std::size_t> radix;
  for (std::size_t i = 0; i < vars.nominal.size(); ++i) radix.push_back(m.worlds.size());
  for (const auto& x : vars.rigid) radix.push_back(m.carrier(0, x.sort).size());
  for (auto r : radix) {
    if (r == 0) return;
  }
  std::vector<std::size_t> digits(radix.size(), 0);
  while (true) {
    Assignment a;
    for (std::size_t i = 0; i < vars.nominal.size(); ++i) a.nominal[vars.nominal[i]] = digits[i];
    for (std::size_t j = 0; j < vars.rigid.size(); ++j) a.rigid[vars.rigid[j].name] = digits[vars.nominal.size() + j];
    if (!visit(a)) return;
    std::size_t i = digits.size();
    while (i > 0) {
      --i;
      if (++digits[i] < radix[i]) break;
      digits[i] = 0;
      if (i == 0) return;
    }
    if (digits.empty()) return;
  }
}

std::vector<KripkeModel> enumerate_expansions(const KripkeModel& m, const VariableBlock& vars) {
  std::vector<KripkeModel> out;
  for_each_assignment(m, vars, [&](const Assignment& a) {
    out.push_back(expand(m, vars, a));
    return true;
  });
  return out;
}

KripkeHomomorphism identity_homomorphism(const KripkeModel& m) {
  KripkeHomomorphism h;
  for (World w = 0; w < m.worlds.size(); ++w) {
    h.world_map.push_back(w);
    std::vector<std::vector<Element>> maps;
    for (const auto& c : m.locals[w].carriers) {
      std::vector<Element> id(c.size());
      for (Element e = 0; e < id.size(); ++e) id[e] = e;
      maps.push_back(std::move(id));
    }
    h.local_maps.push_back(std::move(maps));
  }
  return h;
}

Diagnostics check_homomorphism(const KripkeHomomorphism& h, const KripkeModel& m, const KripkeModel& target) {
  Diagnostics diags;
  auto report = [&](std::string msg) { diags.push_back({std::move(msg), {}}); };
  const Signature& sig = m.signature;
  if (target.signature != sig) {
    report("models are over different signatures");
    return diags;
  }
  const std::size_t n = m.worlds.size();
  if (h.world_map.size() != n || h.local_maps.size() != n) {
    report("homomorphism does not cover every world");
    return diags;
  }
  for (World w : h.world_map) {
    if (w >= target.worlds.size()) {
      report("world map leaves the target");
      return diags;
    }
  }
  for (World w = 0; w < n; ++w) {
    if (h.local_maps[w].size() != sig.sorts.size()) {
      report("local map at world '" + m.worlds[w] + "' does not cover every sort");
      return diags;
    }
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      const auto& map = h.local_maps[w][s];
      if (map.size() != m.locals[w].carriers[s].size()) {
        report("local map at world '" + m.worlds[w] + "' does not cover sort '" + sig.sorts[s].name + "'");
        return diags;
      }
      for (Element e : map) {
        if (e >= target.locals[h.world_map[w]].carriers[s].size()) {
          report("local map at world '" + m.worlds[w] + "' leaves the target carrier");
          return diags;
        }
      }
    }
  }

  for (std::size_t i = 0; i < sig.nominal_ops.size(); ++i) {
    const OpTable& t = m.nominal_ops[i];
    for (std::size_t off = 0; off < t.size(); ++off) {
      auto args = t.arguments(off);
      for (auto& a : args) a = h.world_map[a];
      if (target.nominal_ops[i].at(args) != static_cast<std::int64_t>(h.world_map[t.values[off]])) {
        report("world map does not commute with nominal operation '" + sig.nominal_ops[i].name + "'");
        break;
      }
    }
  }
  for (std::size_t i = 0; i < sig.nominal_rels.size(); ++i) {
    const RelTable& t = m.nominal_rels[i];
    for (std::size_t off = 0; off < t.size(); ++off) {
      if (!t.bits[off]) continue;
      auto args = t.arguments(off);
      for (auto& a : args) a = h.world_map[a];
      if (!target.nominal_rels[i].contains(args)) {
        report("world map does not preserve nominal relation '" + sig.nominal_rels[i].name + "'");
        break;
      }
    }
  }
  for (World w = 0; w < n; ++w) {
    const LocalModel& src = m.locals[w];
    const LocalModel& dst = target.locals[h.world_map[w]];
    const auto& maps = h.local_maps[w];
    auto map_args = [&](std::vector<std::size_t> args, const std::vector<std::string>& sorts) {
      for (std::size_t j = 0; j < args.size(); ++j) args[j] = maps[m.sort_index(sorts[j])][args[j]];
      return args;
    };
    for (std::size_t i = 0; i < sig.ops.size(); ++i) {
      const OpTable& t = src.ops[i];
      const std::size_t result = m.sort_index(sig.ops[i].result);
      for (std::size_t off = 0; off < t.size(); ++off) {
        auto args = map_args(t.arguments(off), sig.ops[i].args);
        if (dst.ops[i].at(args) != static_cast<std::int64_t>(maps[result][t.values[off]])) {
          report("local map at world '" + m.worlds[w] + "' does not commute with '" + sig.ops[i].name + "'");
          break;
        }
      }
    }
    for (std::size_t i = 0; i < sig.rels.size(); ++i) {
      const RelTable& t = src.rels[i];
      for (std::size_t off = 0; off < t.size(); ++off) {
        if (!t.bits[off]) continue;
        if (!dst.rels[i].contains(map_args(t.arguments(off), sig.rels[i].args))) {
          report("local map at world '" + m.worlds[w] + "' does not preserve '" + sig.rels[i].name + "'");
          break;
        }
      }
    }
  }
  for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
    if (!sig.sorts[s].rigid) continue;
    for (World w = 1; w < n; ++w) {
      if (h.local_maps[w][s] != h.local_maps[0][s]) {
        report("rigid-sort agreement violated on '" + sig.sorts[s].name + "'");
        break;
      }
    }
  }
  return diags;
}

namespace {

// Backtracking search. Slots are assigned in order: worlds, then the shared
// elements of rigid sorts, then per-world elements of flexible sorts. Each
// constraint is checked as soon as its last slot is assigned.
class HomomorphismSearch {
 public:
  HomomorphismSearch(const KripkeModel& m, const KripkeModel& target) : m_(m), t_(target) {}

  std::vector<KripkeHomomorphism> run(std::size_t limit) {
    std::vector<KripkeHomomorphism> out;
    if (limit == 0 || m_.signature != t_.signature) return out;
    layout();
    constraints();
    value_.assign(slots_.size(), 0);
    search(0, limit, out);
    return out;
  }

 private:
  struct Slot {
    bool is_world = false;
    World world = 0;  // element slots: source world (for flexible sorts)
    std::size_t sort = 0;
    bool rigid = false;
  };
  struct Constraint {
    std::vector<std::size_t> slots;
    std::function<bool(const std::vector<std::size_t>&)> check;
  };

  const KripkeModel& m_;
  const KripkeModel& t_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> value_;
  std::vector<std::vector<std::size_t>> elem_slot_;  // [w * sorts + s] -> first slot of that carrier
  std::vector<std::vector<Constraint>> by_last_;

  std::size_t sorts() const { return m_.signature.sorts.size(); }

  std::size_t element_slot(World w, std::size_t s, Element e) const {
    const World owner = m_.signature.sorts[s].rigid ? 0 : w;
    return elem_slot_[owner * sorts() + s][e];
  }

  void layout() {
    const std::size_t n = m_.worlds.size();
    for (World w = 0; w < n; ++w) slots_.push_back({true, w, 0, false});
    elem_slot_.assign(n * sorts(), {});
    for (std::size_t s = 0; s < sorts(); ++s) {
      if (!m_.signature.sorts[s].rigid || n == 0) continue;
      for (Element e = 0; e < m_.locals[0].carriers[s].size(); ++e) {
        elem_slot_[s].push_back(slots_.size());
        slots_.push_back({false, 0, s, true});
      }
    }
    for (World w = 0; w < n; ++w) {
      for (std::size_t s = 0; s < sorts(); ++s) {
        if (m_.signature.sorts[s].rigid) continue;
        for (Element e = 0; e < m_.locals[w].carriers[s].size(); ++e) {
          elem_slot_[w * sorts() + s].push_back(slots_.size());
          slots_.push_back({false, w, s, false});
        }
      }
    }
  }

  void add(std::vector<std::size_t> slots, std::function<bool(const std::vector<std::size_t>&)> check) {
    const std::size_t last = *std::max_element(slots.begin(), slots.end());
    by_last_.resize(slots_.size());
    by_last_[last].push_back({std::move(slots), std::move(check)});
  }

  void constraints() {
    by_last_.assign(slots_.size(), {});
    const Signature& sig = m_.signature;
    for (std::size_t i = 0; i < sig.nominal_ops.size(); ++i) {
      const OpTable& t = m_.nominal_ops[i];
      for (std::size_t off = 0; off < t.size(); ++off) {
        std::vector<std::size_t> slots = t.arguments(off);
        slots.push_back(static_cast<std::size_t>(t.values[off]));
        add(slots, [this, i, slots](const std::vector<std::size_t>& v) {
          std::vector<std::size_t> args;
          for (std::size_t j = 0; j + 1 < slots.size(); ++j) args.push_back(v[slots[j]]);
          return t_.nominal_ops[i].at(args) == static_cast<std::int64_t>(v[slots.back()]);
        });
      }
    }
    for (std::size_t i = 0; i < sig.nominal_rels.size(); ++i) {
      const RelTable& t = m_.nominal_rels[i];
      for (std::size_t off = 0; off < t.size(); ++off) {
        if (!t.bits[off]) continue;
        std::vector<std::size_t> slots = t.arguments(off);
        if (slots.empty()) {
          if (!t_.nominal_rels[i].contains(slots)) impossible_ = true;
          continue;
        }
        add(slots, [this, i, slots](const std::vector<std::size_t>& v) {
          std::vector<std::size_t> args;
          for (auto s : slots) args.push_back(v[s]);
          return t_.nominal_rels[i].contains(args);
        });
      }
    }
    for (World w = 0; w < m_.worlds.size(); ++w) {
      const LocalModel& local = m_.locals[w];
      for (std::size_t i = 0; i < sig.ops.size(); ++i) {
        const DataOp& f = sig.ops[i];
        const OpTable& t = local.ops[i];
        for (std::size_t off = 0; off < t.size(); ++off) {
          auto args = t.arguments(off);
          std::vector<std::size_t> slots{w};
          for (std::size_t j = 0; j < args.size(); ++j) slots.push_back(element_slot(w, m_.sort_index(f.args[j]), args[j]));
          slots.push_back(element_slot(w, m_.sort_index(f.result), static_cast<Element>(t.values[off])));
          add(slots, [this, i, slots](const std::vector<std::size_t>& v) {
            std::vector<std::size_t> image;
            for (std::size_t j = 1; j + 1 < slots.size(); ++j) image.push_back(v[slots[j]]);
            return t_.locals[v[slots[0]]].ops[i].at(image) == static_cast<std::int64_t>(v[slots.back()]);
          });
        }
      }
      for (std::size_t i = 0; i < sig.rels.size(); ++i) {
        const DataRel& r = sig.rels[i];
        const RelTable& t = local.rels[i];
        for (std::size_t off = 0; off < t.size(); ++off) {
          if (!t.bits[off]) continue;
          auto args = t.arguments(off);
          std::vector<std::size_t> slots{w};
          for (std::size_t j = 0; j < args.size(); ++j) slots.push_back(element_slot(w, m_.sort_index(r.args[j]), args[j]));
          add(slots, [this, i, slots](const std::vector<std::size_t>& v) {
            std::vector<std::size_t> image;
            for (std::size_t j = 1; j < slots.size(); ++j) image.push_back(v[slots[j]]);
            return t_.locals[v[slots[0]]].rels[i].contains(image);
          });
        }
      }
    }
  }

  bool impossible_ = false;

  std::size_t domain(std::size_t i) const {
    const Slot& s = slots_[i];
    if (s.is_world) return t_.worlds.size();
    if (s.rigid) return t_.worlds.empty() ? 0 : t_.locals[0].carriers[s.sort].size();
    return t_.locals[value_[s.world]].carriers[s.sort].size();
  }

  void search(std::size_t i, std::size_t limit, std::vector<KripkeHomomorphism>& out) {
    if (impossible_ || out.size() >= limit) return;
    if (i == slots_.size()) {
      out.push_back(extract());
      return;
    }
    const std::size_t n = domain(i);
    for (std::size_t v = 0; v < n && out.size() < limit; ++v) {
      value_[i] = v;
      bool ok = true;
      for (const auto& c : by_last_[i]) {
        if (!c.check(value_)) {
          ok = false;
          break;
        }
      }
      if (ok) search(i + 1, limit, out);
    }
  }

  KripkeHomomorphism extract() const {
    KripkeHomomorphism h;
    for (World w = 0; w < m_.worlds.size(); ++w) {
      h.world_map.push_back(value_[w]);
      std::vector<std::vector<Element>> maps(sorts());
      for (std::size_t s = 0; s < sorts(); ++s) {
        for (Element e = 0; e < m_.locals[w].carriers[s].size(); ++e) maps[s].push_back(value_[element_slot(w, s, e)]);
      }
      h.local_maps.push_back(std::move(maps));
    }
    return h;
  }
};

}  // namespace

std::vector<KripkeHomomorphism> find_homomorphisms(const KripkeModel& m, const KripkeModel& target, std::size_t limit) {
  return HomomorphismSearch(m, target).run(limit);
}

}  // namespace hdfol
