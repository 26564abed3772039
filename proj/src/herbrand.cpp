#include "hdfol/herbrand.hpp"

#include <algorithm>
#include <functional>

#include "hdfol/frontend/printer.hpp"
#include "hdfol/wellformed.hpp"

namespace hdfol {

Diagnostics validate_query(const Signature& sig, const Query& q) {
  Diagnostics diags = validate_variable_block(sig, q.vars);
  for (const auto& e : q.body) {
    if (!e.is_atom_or_action()) {
      diags.push_back({"query body must be atomic", {}});
      continue;
    }
    for (auto& d : check_sentence(sig, e, q.vars)) diags.push_back(std::move(d));
  }
  return diags;
}

namespace {

// The body sentence with each of its terms replaced by its representative.
Sentence on_representatives(const SaturationResult& r, Sentence e) {
  for (auto& k : e.nominals) {
    if (auto c = canonical_form(r, k)) k = *c;
  }
  for (auto& t : e.terms) {
    if (auto c = canonical_form(r, t)) t = *c;
  }
  return e;
}

bool entails_all(const SaturationResult& r, const std::vector<Sentence>& body) {
  return std::all_of(body.begin(), body.end(), [&](const Sentence& e) { return entails_atom(r, e); });
}

}  // namespace

SolveResult solve(const SaturationResult& saturated, const Query& q, std::size_t limit, AnswerMode mode) {
  SolveResult out;
  out.status = saturated.status;
  out.rounds = saturated.rounds;
  if (limit == 0) return out;

  // Candidate terms per variable, in canonical order.
  const TermUniverse& u = saturated.universe;
  std::vector<std::vector<NominalTerm>> nominal_choices;
  std::vector<std::vector<HybridTerm>> rigid_choices;
  for (std::size_t i = 0; i < q.vars.nominal.size(); ++i) {
    nominal_choices.push_back(mode == AnswerMode::Canonical ? saturated.world_representatives : u.nominal_terms);
  }
  for (const auto& x : q.vars.rigid) {
    if (mode == AnswerMode::Canonical) {
      auto it = saturated.element_representatives.find(x.sort);
      rigid_choices.push_back(it == saturated.element_representatives.end() ? std::vector<HybridTerm>{} : it->second);
    } else {
      rigid_choices.push_back(u.hybrid_terms.front().at(x.sort));
    }
  }

  std::size_t max_depth = 0;
  for (const auto& cs : nominal_choices) {
    for (const auto& k : cs) max_depth = std::max(max_depth, depth(k));
  }
  for (const auto& cs : rigid_choices) {
    for (const auto& t : cs) max_depth = std::max(max_depth, depth(t));
  }

  const std::size_t n = q.vars.nominal.size();
  const std::size_t arity = q.vars.size();
  auto choice_count = [&](std::size_t i) { return i < n ? nominal_choices[i].size() : rigid_choices[i - n].size(); };
  auto choice_depth = [&](std::size_t i, std::size_t j) {
    return i < n ? depth(nominal_choices[i][j]) : depth(rigid_choices[i - n][j]);
  };
  for (std::size_t i = 0; i < arity; ++i) {
    if (choice_count(i) == 0) return out;
  }

  // Level by level in the largest depth; within a level, lexicographically.
  std::vector<std::size_t> pick(arity, 0);
  for (std::size_t level = 0; level <= max_depth && out.answers.size() < limit; ++level) {
    std::function<void(std::size_t, bool)> rec = [&](std::size_t i, bool reached) {
      if (out.answers.size() >= limit) return;
      if (i == arity) {
        if (!reached && arity > 0) return;
        Substitution theta;
        theta.domain = q.vars;
        for (std::size_t v = 0; v < n; ++v) theta.nominal[q.vars.nominal[v]] = nominal_choices[v][pick[v]];
        for (std::size_t v = n; v < arity; ++v) theta.rigid[q.vars.rigid[v - n].name] = rigid_choices[v - n][pick[v]];
        std::vector<Sentence> instance;
        for (const auto& e : q.body) instance.push_back(apply_substitution(theta, e));
        if (!entails_all(saturated, instance)) return;
        Answer a;
        a.depth = level;
        for (const auto& e : instance) a.witness.push_back(print(on_representatives(saturated, e)));
        a.substitution = std::move(theta);
        out.answers.push_back(std::move(a));
        return;
      }
      for (std::size_t j = 0; j < choice_count(i); ++j) {
        const std::size_t d = choice_depth(i, j);
        if (d > level) continue;
        pick[i] = j;
        rec(i + 1, reached || d == level);
      }
    };
    rec(0, false);
    if (arity == 0) break;
  }
  return out;
}

SolveResult solve(const Signature& sig, const std::vector<HornClause>& gamma, const Query& q, const SolveOptions& options) {
  if (auto diags = validate_query(sig, q); !diags.empty()) throw Error(std::move(diags));
  const SaturationResult saturated = saturate(sig, gamma, options.depth, options.saturation);
  return solve(saturated, q, options.limit, options.mode);
}

bool verify_answer(const Signature& sig, const std::vector<HornClause>& gamma, const Query& q, const Substitution& theta,
                   std::size_t depth, const SaturationOptions& options) {
  if (auto diags = validate_query(sig, q); !diags.empty()) throw Error(std::move(diags));
  if (theta.domain != q.vars || !theta.codomain.empty()) throw Error("answer must be a ground substitution for the query variables");
  if (auto diags = validate_substitution(sig, theta); !diags.empty()) throw Error(std::move(diags));
  const SaturationResult saturated = saturate(sig, gamma, depth, options);
  std::vector<Sentence> instance;
  for (const auto& e : q.body) instance.push_back(apply_substitution(theta, e));
  return entails_all(saturated, instance);
}

}  // namespace hdfol
