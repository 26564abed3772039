#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdfol/diagnostic.hpp"
#include "hdfol/morphism.hpp"
#include "hdfol/signature.hpp"
#include "hdfol/substitution.hpp"
#include "hdfol/syntax.hpp"

namespace hdfol {

using World = std::size_t;
using Element = std::size_t;

// Dense table of a total (or, while under construction, partial) function.
// Arguments are laid out in row-major order over `dims`.
struct OpTable {
  static constexpr std::int64_t kUndefined = -1;

  std::vector<std::size_t> dims;
  std::vector<std::int64_t> values;

  static OpTable make(std::vector<std::size_t> dims);

  std::size_t size() const { return values.size(); }
  std::size_t offset(std::span<const std::size_t> args) const;
  std::vector<std::size_t> arguments(std::size_t offset) const;
  std::int64_t at(std::span<const std::size_t> args) const { return values[offset(args)]; }
  void set(std::span<const std::size_t> args, std::size_t value) {
    values[offset(args)] = static_cast<std::int64_t>(value);
  }

  bool operator==(const OpTable&) const = default;
};

struct RelTable {
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> bits;

  static RelTable make(std::vector<std::size_t> dims);

  std::size_t size() const { return bits.size(); }
  std::size_t offset(std::span<const std::size_t> args) const;
  std::vector<std::size_t> arguments(std::size_t offset) const;
  bool contains(std::span<const std::size_t> args) const { return bits[offset(args)] != 0; }
  void insert(std::span<const std::size_t> args) { bits[offset(args)] = 1; }

  bool operator==(const RelTable&) const = default;
};

// The data model M_w of one world. Everything is indexed by position in the
// signature: carriers by sort, ops by data op, rels by data relation. Rigid
// entries are stored in every world and must coincide.
struct LocalModel {
  std::vector<std::vector<std::string>> carriers;
  std::vector<OpTable> ops;
  std::vector<RelTable> rels;

  bool operator==(const LocalModel&) const = default;
};

struct KripkeModel {
  Signature signature;
  std::vector<std::string> worlds;
  std::vector<OpTable> nominal_ops;   // by signature.nominal_ops index
  std::vector<RelTable> nominal_rels; // by signature.nominal_rels index
  std::vector<LocalModel> locals;     // by world

  std::optional<World> find_world(std::string_view name) const;
  std::size_t sort_index(std::string_view sort) const;
  const std::vector<std::string>& carrier(World w, std::string_view sort) const;

  bool operator==(const KripkeModel&) const = default;
};

// A model with all tables allocated (ops undefined, relations empty) for the
// given worlds and per-world carriers; rigid carriers are taken from world 0's
// entry of `carriers`.
KripkeModel make_model(const Signature& sig, std::vector<std::string> worlds,
                       const std::vector<std::vector<std::vector<std::string>>>& carriers);

Diagnostics validate_model(const Signature& sig, const KripkeModel& m);

// Binary relation on worlds as an adjacency matrix.
struct WorldRelation {
  std::size_t n = 0;
  std::vector<std::uint8_t> bits;

  explicit WorldRelation(std::size_t worlds = 0) : n(worlds), bits(worlds * worlds, 0) {}
  static WorldRelation identity(std::size_t worlds);

  bool contains(World a, World b) const { return bits[a * n + b] != 0; }
  void insert(World a, World b) { bits[a * n + b] = 1; }
  std::vector<std::pair<World, World>> pairs() const;
  std::vector<World> successors(World a) const;

  bool operator==(const WorldRelation&) const = default;
};

WorldRelation compose(const WorldRelation& a, const WorldRelation& b);
WorldRelation unite(const WorldRelation& a, const WorldRelation& b);
WorldRelation reflexive_transitive_closure(const WorldRelation& r);

// Values of bound variables; free variables not listed here are looked up as
// constants of the model's signature.
struct Assignment {
  std::map<std::string, World> nominal;
  std::map<std::string, Element> rigid;
};

World interpret_nominal_term(const KripkeModel& m, const NominalTerm& k, const Assignment& env = {});
Element interpret_hybrid_term(const KripkeModel& m, const HybridTerm& t, const Assignment& env = {});
WorldRelation interpret_action(const KripkeModel& m, const Action& a);

bool satisfies(const KripkeModel& m, World w, const Sentence& g, const Assignment& env = {});
// True at every world.
bool satisfies_everywhere(const KripkeModel& m, const Sentence& g);

KripkeModel reduct_along_morphism(const SignatureMorphism& phi, const KripkeModel& m);
// `m` is a Delta[theta.codomain]-model; the result is its Delta[theta.domain]
// reduct, with each variable interpreted as the value of its image.
KripkeModel reduct_along_substitution(const Substitution& theta, const KripkeModel& m);

// The expansion of `m` to Delta[X] fixed by one assignment of X.
KripkeModel expand(const KripkeModel& m, const VariableBlock& vars, const Assignment& values);
// Visits every assignment of worlds to nominal variables and rigid carrier
// elements to rigid variables, in odometer order.
void for_each_assignment(const KripkeModel& m, const VariableBlock& vars,
                         const std::function<bool(const Assignment&)>& visit);
std::vector<KripkeModel> enumerate_expansions(const KripkeModel& m, const VariableBlock& vars);

struct KripkeHomomorphism {
  std::vector<World> world_map;
  // local_maps[w][sort][element of M_w] = element of M'_{h(w)}
  std::vector<std::vector<std::vector<Element>>> local_maps;

  bool operator==(const KripkeHomomorphism&) const = default;
};

KripkeHomomorphism identity_homomorphism(const KripkeModel& m);

Diagnostics check_homomorphism(const KripkeHomomorphism& h, const KripkeModel& m, const KripkeModel& target);

// Up to `limit` homomorphisms m -> target in a deterministic order.
std::vector<KripkeHomomorphism> find_homomorphisms(const KripkeModel& m, const KripkeModel& target,
                                                   std::size_t limit);

}  // namespace hdfol
