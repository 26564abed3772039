#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdfol/horn.hpp"
#include "hdfol/kripke.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

// Ground terms up to a depth bound. Hybrid terms of rigid sort are listed at
// every nominal index; flexible-sorted ones only at their own tag.
struct TermUniverse {
  enum class Completeness { Exact, Truncated };

  Signature signature;
  std::size_t depth_bound = 0;
  std::vector<NominalTerm> nominal_terms;  // canonical order
  // hybrid_terms[i] holds T_{k,s} for k = nominal_terms[i], keyed by sort
  std::vector<std::map<std::string, std::vector<HybridTerm>>> hybrid_terms;
  // Exact when no term of greater depth exists. Saturation refines this.
  Completeness completeness = Completeness::Exact;

  std::optional<std::size_t> nominal_index(const NominalTerm& k) const;
};

// Throws Error when the signature has no nominal constant.
TermUniverse build_term_universe(const Signature& sig, std::size_t depth);

struct NominalCongruence {
  std::vector<NominalTerm> terms;
  std::vector<std::size_t> class_of;         // per term; classes are numbered in representative order
  std::vector<NominalTerm> representatives;  // least member of each class

  std::size_t class_count() const { return representatives.size(); }
  std::optional<std::size_t> class_index(const NominalTerm& k) const;
};

// Worlds are the nominal classes. Operation entries whose result lies
// outside the universe stay undefined.
struct NominalQuotient {
  NominalCongruence congruence;
  std::vector<OpTable> ops;
  std::vector<RelTable> rels;
};

NominalQuotient nominal_congruence_closure(const TermUniverse& u, const std::vector<Sentence>& equations,
                                           const std::vector<Sentence>& relations);

struct HybridCongruence {
  // classes[w][sort] lists the classes of the terms available at world w,
  // each with its canonical representative first; classes are sorted by
  // representative.
  std::vector<std::map<std::string, std::vector<std::vector<HybridTerm>>>> classes;

  std::optional<std::size_t> class_index(World w, const std::string& sort, const HybridTerm& t) const;
  bool congruent(World w, const std::string& sort, const HybridTerm& a, const HybridTerm& b) const;
};

HybridCongruence hybrid_congruence_closure(const NominalQuotient& worlds, const TermUniverse& u,
                                           const std::vector<Sentence>& equations);

// A congruence on an explicit model: class_of[w][sort][element].
struct ModelCongruence {
  std::vector<std::vector<std::vector<std::size_t>>> class_of;
};

struct GeneratorPair {
  World world;
  std::string sort;
  Element a;
  Element b;
};

// Least congruence containing the given pairs: closed under every data
// operation and shared across worlds on rigid sorts.
ModelCongruence generate_congruence(const KripkeModel& m, const std::vector<GeneratorPair>& pairs);

Diagnostics validate_congruence(const KripkeModel& m, const ModelCongruence& c);

// Quotient with identical worlds and the projection homomorphism onto it.
// Throws Error when `c` is not a congruence on `m`.
std::pair<KripkeModel, KripkeHomomorphism> quotient_model(const KripkeModel& m, const ModelCongruence& c);

enum class SaturationStatus { Fixpoint, BoundExhausted };

struct SaturationOptions {
  std::size_t round_limit = 1000;
};

class SaturationState;

struct SaturationResult {
  KripkeModel model;
  std::vector<Sentence> atom_base;
  std::size_t rounds = 0;
  SaturationStatus status = SaturationStatus::BoundExhausted;
  std::size_t depth = 0;
  TermUniverse universe;
  // World and element representatives, in model order.
  std::vector<NominalTerm> world_representatives;
  std::map<std::string, std::vector<HybridTerm>> element_representatives;  // rigid sorts only
  std::shared_ptr<const SaturationState> state;
};

// Throws Error when the theory is invalid or has no nominal constant.
SaturationResult saturate(const Signature& sig, const std::vector<HornClause>& gamma, std::size_t depth,
                          const SaturationOptions& options = {});

// At fixpoint, additionally checks that the model satisfies every clause at
// every world and throws std::logic_error if not.
std::pair<KripkeModel, SaturationResult> build_initial_model(const Signature& sig, const std::vector<HornClause>& gamma,
                                                             std::size_t depth, const SaturationOptions& options = {});

// Gamma |= rho for a ground atom or action relation. Exact at fixpoint;
// otherwise a `true` answer is still sound.
bool entails_atom(const SaturationResult& result, const Sentence& rho);

// The representative form of a ground term, if its value is reachable within the universe.
std::optional<NominalTerm> canonical_form(const SaturationResult& result, const NominalTerm& k);
std::optional<HybridTerm> canonical_form(const SaturationResult& result, const HybridTerm& t);

}  // namespace hdfol
