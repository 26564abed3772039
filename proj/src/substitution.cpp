#include "hdfol/substitution.hpp"

#include <set>

#include "hdfol/wellformed.hpp"

namespace hdfol {

Substitution Substitution::identity(const VariableBlock& vars) {
  Substitution s;
  s.domain = vars;
  s.codomain = vars;
  return s;
}

NominalTerm Substitution::image(const NominalTerm& var) const {
  auto it = nominal.find(var.symbol);
  return it == nominal.end() ? var : it->second;
}

HybridTerm Substitution::image(const HybridTerm& var) const {
  auto it = rigid.find(var.symbol);
  return it == rigid.end() ? var : it->second;
}

Diagnostics validate_substitution(const Signature& sig, const Substitution& theta) {
  Diagnostics diags;
  auto append = [&](const Diagnostics& more) { diags.insert(diags.end(), more.begin(), more.end()); };
  for (const auto& z : theta.domain.nominal) {
    append(check_nominal_term(sig, theta.image(nom_var(z)), theta.codomain));
  }
  for (const auto& x : theta.domain.rigid) {
    auto r = check_rigid_term(sig, theta.image(data_var(x.name, x.sort)), theta.codomain);
    if (!r) {
      append(r.diagnostics());
    } else if (r.value() != x.sort) {
      diags.push_back({"substitution maps '" + x.name + ":" + x.sort + "' to a term of sort '" + r.value() + "'", {}});
    }
  }
  for (const auto& [name, _] : theta.nominal) {
    if (!theta.domain.has_nominal(name)) diags.push_back({"'" + name + "' is not in the substitution domain", {}});
  }
  for (const auto& [name, _] : theta.rigid) {
    if (!theta.domain.rigid_sort(name)) diags.push_back({"'" + name + "' is not in the substitution domain", {}});
  }
  return diags;
}

NominalTerm apply_substitution(const Substitution& theta, const NominalTerm& k) {
  if (k.is_var()) return theta.image(k);
  NominalTerm out = k;
  for (auto& a : out.args) a = apply_substitution(theta, a);
  return out;
}

HybridTerm apply_substitution(const Substitution& theta, const HybridTerm& t) {
  if (t.kind == HybridTerm::Kind::Var) return theta.image(t);
  HybridTerm out = t;
  if (out.tag) out.tag = apply_substitution(theta, *out.tag);
  for (auto& a : out.args) a = apply_substitution(theta, a);
  return out;
}

namespace {

void collect_names(const NominalTerm& k, std::set<std::string>& out) {
  out.insert(k.symbol);
  for (const auto& a : k.args) collect_names(a, out);
}

void collect_names(const HybridTerm& t, std::set<std::string>& out) {
  out.insert(t.symbol);
  if (t.tag) collect_names(*t.tag, out);
  for (const auto& a : t.args) collect_names(a, out);
}

void collect_names(const Sentence& g, std::set<std::string>& out) {
  out.insert(g.symbol);
  for (const auto& k : g.nominals) collect_names(k, out);
  for (const auto& t : g.terms) collect_names(t, out);
  for (const auto& z : g.vars.nominal) out.insert(z);
  for (const auto& x : g.vars.rigid) out.insert(x.name);
  for (const auto& h : g.hypotheses) collect_names(h, out);
  for (const auto& b : g.body) collect_names(b, out);
}

class Applier {
 public:
  explicit Applier(const Substitution& theta) : theta_(theta) {
    // Binders may not shadow codomain variables either.
    for (const auto& z : theta.codomain.nominal) image_vars_.insert(z);
    for (const auto& x : theta.codomain.rigid) image_vars_.insert(x.name);
    for (const auto& [_, k] : theta.nominal) {
      for (const auto& z : free_variables(k).nominal) image_vars_.insert(z);
    }
    for (const auto& [_, t] : theta.rigid) {
      auto fv = free_variables(t);
      for (const auto& z : fv.nominal) image_vars_.insert(z);
      for (const auto& x : fv.rigid) image_vars_.insert(x.name);
    }
  }

  Sentence run(const Sentence& g) {
    using K = Sentence::Kind;
    if (g.kind == K::Store || g.kind == K::Forall) return binder(g);
    Sentence out = g;
    for (auto& k : out.nominals) k = apply_substitution(theta_, k);
    for (auto& t : out.terms) t = apply_substitution(theta_, t);
    for (auto& h : out.hypotheses) h = run(h);
    for (auto& b : out.body) b = run(b);
    return out;
  }

 private:
  const Substitution& theta_;
  std::set<std::string> image_vars_;

  Sentence binder(const Sentence& g) {
    // Bound occurrences are never substituted; clashing ones get renamed.
    Substitution inner = theta_;
    Substitution rename;
    std::set<std::string> used = image_vars_;
    collect_names(g, used);
    for (const auto& [name, _] : theta_.nominal) used.insert(name);
    for (const auto& [name, _] : theta_.rigid) used.insert(name);

    Sentence out = g;
    auto fresh = [&](const std::string& base) {
      for (int i = 1;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (used.insert(candidate).second) return candidate;
      }
    };
    auto rebind_nominal = [&](std::string& z) {
      inner.nominal.erase(z);
      if (image_vars_.count(z)) {
        std::string renamed = fresh(z);
        rename.domain.nominal.push_back(z);
        rename.nominal[z] = nom_var(renamed);
        z = renamed;
      }
    };
    if (g.kind == Sentence::Kind::Store) {
      rebind_nominal(out.symbol);
    } else {
      for (auto& z : out.vars.nominal) rebind_nominal(z);
      for (auto& x : out.vars.rigid) {
        inner.rigid.erase(x.name);
        if (image_vars_.count(x.name)) {
          std::string renamed = fresh(x.name);
          rename.domain.rigid.push_back(x);
          rename.rigid[x.name] = data_var(renamed, x.sort);
          x.name = renamed;
        }
      }
    }
    Sentence body = g.sub();
    if (!rename.domain.empty()) body = Applier(rename).run(body);
    out.body = {Applier(inner).run(body)};
    return out;
  }
};

}  // namespace

Sentence apply_substitution(const Substitution& theta, const Sentence& g) { return Applier(theta).run(g); }

Substitution compose_substitutions(const Substitution& first, const Substitution& second) {
  if (first.codomain != second.domain) throw Error("cannot compose substitutions: codomain and domain blocks differ");
  Substitution out;
  out.domain = first.domain;
  out.codomain = second.codomain;
  // Self-maps are left implicit so that identity laws hold structurally.
  for (const auto& z : first.domain.nominal) {
    NominalTerm k = apply_substitution(second, first.image(nom_var(z)));
    if (k != nom_var(z)) out.nominal[z] = std::move(k);
  }
  for (const auto& x : first.domain.rigid) {
    HybridTerm t = apply_substitution(second, first.image(data_var(x.name, x.sort)));
    if (t != data_var(x.name, x.sort)) out.rigid[x.name] = std::move(t);
  }
  return out;
}

}  // namespace hdfol
