#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "hdfol/diagnostic.hpp"
#include "hdfol/horn.hpp"
#include "hdfol/initial.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/substitution.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

// exists X . /\ E, with E a finite set of atoms and action relations over Delta[X].
struct Query {
  VariableBlock vars;
  std::vector<Sentence> body;

  bool operator==(const Query&) const = default;
};

Diagnostics validate_query(const Signature& sig, const Query& q);

enum class AnswerMode { Canonical, AllSyntactic };

struct Answer {
  Substitution substitution;      // q.vars -> empty block
  std::vector<std::string> witness;  // per body sentence, its instance on representatives
  std::size_t depth = 0;          // largest depth among the answer terms
};

struct SolveOptions {
  std::size_t depth = 3;
  std::size_t limit = std::numeric_limits<std::size_t>::max();
  AnswerMode mode = AnswerMode::Canonical;
  SaturationOptions saturation;
};

struct SolveResult {
  std::vector<Answer> answers;
  SaturationStatus status = SaturationStatus::BoundExhausted;
  std::size_t rounds = 0;
};

// Answers in order of increasing largest term depth, then lexicographically
// in canonical term order over the variables (nominal ones first).
SolveResult solve(const Signature& sig, const std::vector<HornClause>& gamma, const Query& q,
                  const SolveOptions& options = {});
SolveResult solve(const SaturationResult& saturated, const Query& q, std::size_t limit = std::numeric_limits<std::size_t>::max(),
                  AnswerMode mode = AnswerMode::Canonical);

// Saturates independently and checks every instantiated body sentence.
// Throws Error when theta is not a ground substitution for q.vars.
bool verify_answer(const Signature& sig, const std::vector<HornClause>& gamma, const Query& q, const Substitution& theta,
                   std::size_t depth, const SaturationOptions& options = {});

}  // namespace hdfol
