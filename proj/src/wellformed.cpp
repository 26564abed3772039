#include "hdfol/wellformed.hpp"

#include "hdfol/frontend/printer.hpp"

namespace hdfol {

namespace {

class Checker {
 public:
  Checker(const Signature& sig, VariableBlock scope) : sig_(sig), scope_(std::move(scope)) {}

  Diagnostics diags;

  void nominal(const NominalTerm& k) {
    if (k.is_var()) {
      if (!scope_.has_nominal(k.symbol)) fail("unbound nominal variable '" + k.symbol + "'");
      if (!k.args.empty()) fail("nominal variable '" + k.symbol + "' applied to arguments");
      return;
    }
    const NominalSymbol* f = sig_.find_nominal_op(k.symbol);
    if (f == nullptr) {
      fail("undeclared nominal operation '" + k.symbol + "'");
      return;
    }
    if (f->arity != k.args.size()) {
      fail("arity mismatch for '" + k.symbol + "': expected " + std::to_string(f->arity) + ", got " +
           std::to_string(k.args.size()));
    }
    for (const auto& a : k.args) nominal(a);
  }

  // Returns the sort of t in T_{k}; `k` absent means "no particular world",
  // which only rigid-sorted terms satisfy.
  std::optional<std::string> hybrid(const HybridTerm& t, const std::optional<NominalTerm>& k) {
    switch (t.kind) {
      case HybridTerm::Kind::Var: {
        auto sort = scope_.rigid_sort(t.symbol);
        if (!sort) return fail("unbound variable '" + t.symbol + "'");
        if (*sort != t.sort) return fail("variable '" + t.symbol + "' used at sort '" + t.sort + "', declared '" + *sort + "'");
        if (!t.args.empty()) return fail("variable '" + t.symbol + "' applied to arguments");
        return sort;
      }
      case HybridTerm::Kind::Rigid: {
        const DataOp* f = sig_.find_op(t.symbol);
        if (f == nullptr) return fail("undeclared operation '" + t.symbol + "'");
        if (!f->rigid) return fail("flexible operation '" + t.symbol + "' needs a world tag");
        if (t.tag) return fail("rigid operation '" + t.symbol + "' carries a world tag");
        if (!arguments(*f, t.args, k)) return std::nullopt;
        return f->result;
      }
      case HybridTerm::Kind::Flex: {
        const DataOp* f = sig_.find_op(t.symbol);
        if (f == nullptr) return fail("undeclared operation '" + t.symbol + "'");
        if (f->rigid) return fail("rigid operation '" + t.symbol + "' carries a world tag");
        if (!t.tag) return fail("flexible operation '" + t.symbol + "' needs a world tag");
        const std::size_t before = diags.size();
        nominal(*t.tag);
        if (diags.size() != before) return std::nullopt;
        if (!arguments(*f, t.args, *t.tag)) return std::nullopt;
        if (!sig_.is_rigid_sort(f->result) && (!k || *k != *t.tag)) {
          return fail("flexible-sorted term at wrong world: '" + print(t) + "'" +
                      (k ? " used at index '" + print(*k) + "'" : std::string(" used without a world index")));
        }
        return f->result;
      }
    }
    return std::nullopt;
  }

  void action(const Action& a) {
    if (a.kind == Action::Kind::Modality) {
      if (!sig_.is_modality(a.modality)) fail("'" + a.modality + "' is not a binary nominal relation");
      return;
    }
    for (const auto& p : a.parts) action(p);
  }

  void sentence(const Sentence& g) {
    using K = Sentence::Kind;
    switch (g.kind) {
      case K::NomEq:
        nominal(g.nominals[0]);
        nominal(g.nominals[1]);
        return;
      case K::NomRel: {
        const NominalSymbol* r = sig_.find_nominal_rel(g.symbol);
        if (r == nullptr) return (void)fail("undeclared nominal relation '" + g.symbol + "'");
        if (r->arity != g.nominals.size()) return (void)fail("arity mismatch for '" + g.symbol + "'");
        for (const auto& k : g.nominals) nominal(k);
        return;
      }
      case K::HybEq: {
        nominal(g.index());
        for (const auto& t : g.terms) {
          auto s = hybrid(t, g.index());
          if (s && *s != g.sort) fail("equation at sort '" + g.sort + "' has operand of sort '" + *s + "'");
        }
        if (!sig_.find_sort(g.sort)) fail("undeclared sort '" + g.sort + "'");
        return;
      }
      case K::RigidRel:
      case K::FlexRel: {
        const DataRel* r = sig_.find_rel(g.symbol);
        if (r == nullptr) return (void)fail("undeclared relation '" + g.symbol + "'");
        const bool flexible = g.kind == K::FlexRel;
        if (r->rigid == flexible) {
          return (void)fail(flexible ? "rigid relation '" + g.symbol + "' carries a world index"
                                     : "flexible relation '" + g.symbol + "' needs a world index");
        }
        if (r->args.size() != g.terms.size()) return (void)fail("arity mismatch for '" + g.symbol + "'");
        std::optional<NominalTerm> k;
        if (flexible) {
          nominal(g.index());
          k = g.index();
        }
        for (std::size_t i = 0; i < g.terms.size(); ++i) {
          auto s = hybrid(g.terms[i], k);
          if (s && *s != r->args[i]) fail("argument " + std::to_string(i + 1) + " of '" + g.symbol + "' has sort '" + *s + "'");
        }
        return;
      }
      case K::ActRel:
        action(*g.action);
        nominal(g.nominals[0]);
        nominal(g.nominals[1]);
        return;
      case K::At:
        nominal(g.index());
        sentence(g.sub());
        return;
      case K::Not:
        sentence(g.sub());
        return;
      case K::And:
        for (const auto& b : g.body) sentence(b);
        return;
      case K::Implies:
        for (const auto& h : g.hypotheses) sentence(h);
        sentence(g.sub());
        return;
      case K::Store: {
        VariableBlock block;
        block.nominal.push_back(g.symbol);
        bind(block, g.sub());
        return;
      }
      case K::Forall:
        bind(g.vars, g.sub());
        return;
      case K::Nec:
        action(*g.action);
        sentence(g.sub());
        return;
      case K::Next: {
        const NominalSymbol* f = sig_.find_nominal_op(g.symbol);
        if (f == nullptr || f->arity != 1) fail("'" + g.symbol + "' is not a unary nominal operation");
        sentence(g.sub());
        return;
      }
    }
  }

 private:
  const Signature& sig_;
  VariableBlock scope_;

  std::nullopt_t fail(std::string message) {
    diags.push_back({std::move(message), {}});
    return std::nullopt;
  }

  bool arguments(const DataOp& f, const std::vector<HybridTerm>& args, const std::optional<NominalTerm>& k) {
    if (f.args.size() != args.size()) {
      fail("arity mismatch for '" + f.name + "': expected " + std::to_string(f.args.size()) + ", got " +
           std::to_string(args.size()));
      return false;
    }
    bool ok = true;
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto s = hybrid(args[i], k);
      if (!s) {
        ok = false;
      } else if (*s != f.args[i]) {
        fail("sort mismatch: argument " + std::to_string(i + 1) + " of '" + f.name + "' expects '" + f.args[i] +
             "', got '" + *s + "'");
        ok = false;
      }
    }
    return ok;
  }

  void bind(const VariableBlock& block, const Sentence& body) {
    for (auto& d : validate_variable_block(sig_, block)) diags.push_back(std::move(d));
    for (const auto& z : block.nominal) {
      if (scope_.contains(z)) fail("variable '" + z + "' shadows a variable in scope");
    }
    for (const auto& x : block.rigid) {
      if (scope_.contains(x.name)) fail("variable '" + x.name + "' shadows a variable in scope");
    }
    VariableBlock saved = scope_;
    for (const auto& z : block.nominal) scope_.nominal.push_back(z);
    for (const auto& x : block.rigid) scope_.rigid.push_back(x);
    sentence(body);
    scope_ = std::move(saved);
  }
};

}  // namespace

Diagnostics check_nominal_term(const Signature& sig, const NominalTerm& k, const VariableBlock& scope) {
  Checker c(sig, scope);
  c.nominal(k);
  return c.diags;
}

Result<std::string> check_hybrid_term(const Signature& sig, const HybridTerm& t, const NominalTerm& k,
                                      const VariableBlock& scope) {
  Checker c(sig, scope);
  c.nominal(k);
  auto sort = c.hybrid(t, k);
  if (!c.diags.empty() || !sort) return c.diags;
  return *sort;
}

Result<std::string> check_rigid_term(const Signature& sig, const HybridTerm& t, const VariableBlock& scope) {
  Checker c(sig, scope);
  auto sort = c.hybrid(t, std::nullopt);
  if (!c.diags.empty() || !sort) return c.diags;
  if (!sig.is_rigid_sort(*sort)) return Diagnostics{{"term '" + print(t) + "' is not of rigid sort", {}}};
  return *sort;
}

Diagnostics check_action(const Signature& sig, const Action& a) {
  Checker c(sig, {});
  c.action(a);
  return c.diags;
}

Diagnostics check_sentence(const Signature& sig, const Sentence& g, const VariableBlock& scope) {
  Checker c(sig, scope);
  c.sentence(g);
  return c.diags;
}

}  // namespace hdfol
