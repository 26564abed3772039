#include "hdfol/signature.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hdfol {

namespace {

template <typename Range>
auto find_named(const Range& range, std::string_view name) -> decltype(&*range.begin()) {
  auto it = std::find_if(range.begin(), range.end(), [&](const auto& d) { return d.name == name; });
  return it == range.end() ? nullptr : &*it;
}

}  // namespace

const NominalSymbol* Signature::find_nominal_op(std::string_view name) const { return find_named(nominal_ops, name); }
const NominalSymbol* Signature::find_nominal_rel(std::string_view name) const { return find_named(nominal_rels, name); }
const SortDecl* Signature::find_sort(std::string_view name) const { return find_named(sorts, name); }
const DataOp* Signature::find_op(std::string_view name) const { return find_named(ops, name); }
const DataRel* Signature::find_rel(std::string_view name) const { return find_named(rels, name); }

bool Signature::is_rigid_sort(std::string_view sort) const {
  const SortDecl* d = find_sort(sort);
  return d != nullptr && d->rigid;
}

bool Signature::is_modality(std::string_view name) const {
  const NominalSymbol* r = find_nominal_rel(name);
  return r != nullptr && r->arity == 2;
}

bool Signature::declares(std::string_view name) const {
  return find_nominal_op(name) || find_nominal_rel(name) || find_sort(name) || find_op(name) || find_rel(name);
}

bool VariableBlock::has_nominal(std::string_view name) const {
  return std::find(nominal.begin(), nominal.end(), name) != nominal.end();
}

std::optional<std::string> VariableBlock::rigid_sort(std::string_view name) const {
  for (const auto& v : rigid) {
    if (v.name == name) return v.sort;
  }
  return std::nullopt;
}

VariableBlock merge_blocks(const VariableBlock& a, const VariableBlock& b) {
  VariableBlock out = a;
  for (const auto& z : b.nominal) {
    if (out.contains(z)) throw Error("variable '" + z + "' bound twice");
    out.nominal.push_back(z);
  }
  for (const auto& x : b.rigid) {
    if (out.contains(x.name)) throw Error("variable '" + x.name + "' bound twice");
    out.rigid.push_back(x);
  }
  return out;
}

Diagnostics validate_signature(const Signature& sig) {
  Diagnostics diags;
  auto report = [&](std::string msg) { diags.push_back({std::move(msg), {}}); };

  // Symbol names must be unique across all families, including sorts.
  std::map<std::string, int> uses;
  auto count = [&](const std::string& name) {
    if (name.empty()) report("empty symbol name");
    ++uses[name];
  };
  for (const auto& f : sig.nominal_ops) count(f.name);
  for (const auto& r : sig.nominal_rels) count(r.name);
  for (const auto& s : sig.sorts) count(s.name);
  for (const auto& f : sig.ops) count(f.name);
  for (const auto& r : sig.rels) count(r.name);
  for (const auto& [name, n] : uses) {
    if (n > 1) report("duplicate symbol '" + name + "'");
  }
  if (uses.count(std::string(kWorldSort))) report("'world' is reserved for the nominal sort");

  auto declared = [&](const std::string& s) { return sig.find_sort(s) != nullptr; };
  for (const auto& f : sig.ops) {
    for (const auto& a : f.args) {
      if (!declared(a)) report("op '" + f.name + "' uses undeclared sort '" + a + "'");
      else if (f.rigid && !sig.is_rigid_sort(a)) report("rigid op '" + f.name + "' takes non-rigid sort '" + a + "'");
    }
    if (!declared(f.result)) report("op '" + f.name + "' has undeclared result sort '" + f.result + "'");
    else if (f.rigid && !sig.is_rigid_sort(f.result)) report("rigid op into non-rigid sort: '" + f.name + "'");
  }
  for (const auto& r : sig.rels) {
    for (const auto& a : r.args) {
      if (!declared(a)) report("rel '" + r.name + "' uses undeclared sort '" + a + "'");
      else if (r.rigid && !sig.is_rigid_sort(a)) report("rigid rel '" + r.name + "' over non-rigid sort '" + a + "'");
    }
  }
  return diags;
}

Diagnostics validate_variable_block(const Signature& sig, const VariableBlock& vars) {
  Diagnostics diags;
  std::set<std::string> seen;
  auto check_name = [&](const std::string& name) {
    if (!seen.insert(name).second) diags.push_back({"variable '" + name + "' declared twice", {}});
    if (sig.declares(name)) diags.push_back({"variable '" + name + "' clashes with a signature symbol", {}});
  };
  for (const auto& z : vars.nominal) check_name(z);
  for (const auto& x : vars.rigid) {
    check_name(x.name);
    if (!sig.is_rigid_sort(x.sort)) {
      diags.push_back({"variable '" + x.name + "' must have a rigid sort, got '" + x.sort + "'", {}});
    }
  }
  return diags;
}

Signature extend_with_variables(const Signature& sig, const VariableBlock& vars) {
  if (auto diags = validate_variable_block(sig, vars); !diags.empty()) throw Error(std::move(diags));
  Signature out = sig;
  for (const auto& z : vars.nominal) out.nominal_ops.push_back({z, 0});
  for (const auto& x : vars.rigid) out.ops.push_back({x.name, {}, x.sort, true});
  return out;
}

}  // namespace hdfol
