#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdfol/diagnostic.hpp"

namespace hdfol {

// Surface name of the single sort of the nominal signature.
inline constexpr std::string_view kWorldSort = "world";

struct NominalSymbol {
  std::string name;
  std::size_t arity = 0;

  bool operator==(const NominalSymbol&) const = default;
};

struct SortDecl {
  std::string name;
  bool rigid = false;

  bool operator==(const SortDecl&) const = default;
};

struct DataOp {
  std::string name;
  std::vector<std::string> args;
  std::string result;
  bool rigid = false;

  bool operator==(const DataOp&) const = default;
};

struct DataRel {
  std::string name;
  std::vector<std::string> args;
  bool rigid = false;

  bool operator==(const DataRel&) const = default;
};

// A signature of nominals (operations and relations over the world sort), a
// data signature of sorts/operations/relations, and the rigid sub-signature
// given by the `rigid` flags. Declaration order is preserved for printing.
struct Signature {
  std::vector<NominalSymbol> nominal_ops;
  std::vector<NominalSymbol> nominal_rels;
  std::vector<SortDecl> sorts;
  std::vector<DataOp> ops;
  std::vector<DataRel> rels;

  const NominalSymbol* find_nominal_op(std::string_view name) const;
  const NominalSymbol* find_nominal_rel(std::string_view name) const;
  const SortDecl* find_sort(std::string_view name) const;
  const DataOp* find_op(std::string_view name) const;
  const DataRel* find_rel(std::string_view name) const;

  bool is_rigid_sort(std::string_view sort) const;
  // Binary nominal relations are the modalities.
  bool is_modality(std::string_view name) const;
  // True if `name` is used by any symbol family or as a sort.
  bool declares(std::string_view name) const;

  bool operator==(const Signature&) const = default;
};

struct RigidVariable {
  std::string name;
  std::string sort;

  auto operator<=>(const RigidVariable&) const = default;
};

// A block X of nominal variables (sort world) and rigid-sorted variables.
struct VariableBlock {
  std::vector<std::string> nominal;
  std::vector<RigidVariable> rigid;

  bool empty() const { return nominal.empty() && rigid.empty(); }
  std::size_t size() const { return nominal.size() + rigid.size(); }
  bool has_nominal(std::string_view name) const;
  // Sort of a rigid variable, if declared in this block.
  std::optional<std::string> rigid_sort(std::string_view name) const;
  bool contains(std::string_view name) const { return has_nominal(name) || rigid_sort(name).has_value(); }

  auto operator<=>(const VariableBlock&) const = default;
};

// Block union; throws Error when a name appears in both.
VariableBlock merge_blocks(const VariableBlock& a, const VariableBlock& b);

Diagnostics validate_signature(const Signature& sig);
Diagnostics validate_variable_block(const Signature& sig, const VariableBlock& vars);

// Signature Delta[X]: nominal variables become nominal constants, rigid
// variables become rigid constants of their sorts.
Signature extend_with_variables(const Signature& sig, const VariableBlock& vars);

}  // namespace hdfol
