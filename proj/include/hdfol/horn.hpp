#pragma once

#include <vector>

#include "hdfol/diagnostic.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

// A Horn clause is a Sentence built from atoms by @, implication with a
// hypothesis of atoms and action relations, store, forall, [a] and next.
using HornClause = Sentence;

// Empty result means the sentence is a Horn clause. Only the first offending
// node is reported.
Diagnostics validate_horn_clause(const Sentence& g);

struct Theory {
  Signature signature;
  std::vector<HornClause> clauses;

  bool operator==(const Theory&) const = default;
};

// Signature validity, well-formedness of every clause, and the Horn fragment.
Diagnostics validate_theory(const Theory& theory);

}  // namespace hdfol
