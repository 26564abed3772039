#include "oracles.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace testing {

BoolMatrix floyd_warshall_star(const BoolMatrix& r) {
  const std::size_t n = r.size();
  BoolMatrix reach = r;
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  return reach;
}

namespace {

// One free cell of the tables: every listed location takes the same value.
struct Slot {
  std::size_t range = 0;
  std::vector<std::int64_t*> op_cells;
  std::vector<std::uint8_t*> rel_cells;

  void write(std::size_t v) const {
    for (auto* c : op_cells) *c = static_cast<std::int64_t>(v);
    for (auto* c : rel_cells) *c = static_cast<std::uint8_t>(v);
  }
};

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

// Calls body(worlds, carriers) for each world count and carrier-size choice.
void for_each_shape(const Signature& sig, std::size_t max_worlds, std::size_t max_carrier,
                    const std::function<bool(std::size_t, const std::vector<std::vector<std::size_t>>&)>& body) {
  for (std::size_t n = 1; n <= max_worlds; ++n) {
    // Digits: one per rigid sort, one per (world, flexible sort).
    std::vector<std::pair<std::size_t, std::size_t>> digits;  // (world or npos, sort)
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      if (sig.sorts[s].rigid) {
        digits.push_back({SIZE_MAX, s});
      } else {
        for (std::size_t w = 0; w < n; ++w) digits.push_back({w, s});
      }
    }
    std::vector<std::size_t> sizes(digits.size(), 1);
    while (true) {
      std::vector<std::vector<std::size_t>> shape(n, std::vector<std::size_t>(sig.sorts.size(), 0));
      for (std::size_t d = 0; d < digits.size(); ++d) {
        const auto [w, s] = digits[d];
        if (w == SIZE_MAX) {
          for (auto& row : shape) row[s] = sizes[d];
        } else {
          shape[w][s] = sizes[d];
        }
      }
      if (!body(n, shape)) return;
      std::size_t d = 0;
      while (d < sizes.size() && sizes[d] == max_carrier) sizes[d++] = 1;
      if (d == sizes.size()) break;
      ++sizes[d];
    }
  }
}

std::vector<std::size_t> op_dims(const Signature& sig, const DataOp& f, const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> dims;
  for (const auto& a : f.args) {
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
      if (sig.sorts[s].name == a) dims.push_back(sizes[s]);
    }
  }
  return dims;
}

std::size_t sort_size(const Signature& sig, const std::string& sort, const std::vector<std::size_t>& sizes) {
  for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
    if (sig.sorts[s].name == sort) return sizes[s];
  }
  return 0;
}

}  // namespace

double count_models(const Signature& sig, std::size_t max_worlds, std::size_t max_carrier) {
  double total = 0;
  for_each_shape(sig, max_worlds, max_carrier, [&](std::size_t n, const std::vector<std::vector<std::size_t>>& shape) {
    double c = 1;
    for (const auto& f : sig.nominal_ops) c *= std::pow(double(n), double(product(std::vector<std::size_t>(f.arity, n))));
    for (const auto& r : sig.nominal_rels) c *= std::pow(2.0, double(product(std::vector<std::size_t>(r.arity, n))));
    for (const auto& f : sig.ops) {
      for (std::size_t w = 0; w < (f.rigid ? 1 : n); ++w) {
        c *= std::pow(double(sort_size(sig, f.result, shape[w])), double(product(op_dims(sig, f, shape[w]))));
      }
    }
    for (const auto& r : sig.rels) {
      for (std::size_t w = 0; w < (r.rigid ? 1 : n); ++w) {
        DataOp as_op{r.name, r.args, "", r.rigid};
        c *= std::pow(2.0, double(product(op_dims(sig, as_op, shape[w]))));
      }
    }
    total += c;
    return true;
  });
  return total;
}

void enumerate_models(const Signature& sig, std::size_t max_worlds, std::size_t max_carrier,
                      const std::function<bool(const KripkeModel&)>& visit) {
  for_each_shape(sig, max_worlds, max_carrier, [&](std::size_t n, const std::vector<std::vector<std::size_t>>& shape) {
    std::vector<std::string> worlds;
    for (std::size_t w = 0; w < n; ++w) worlds.push_back("u" + std::to_string(w));
    std::vector<std::vector<std::vector<std::string>>> carriers(n);
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
        std::vector<std::string> c;
        for (std::size_t e = 0; e < shape[w][s]; ++e) c.push_back("e" + std::to_string(e));
        carriers[w].push_back(std::move(c));
      }
    }
    KripkeModel m = make_model(sig, worlds, carriers);

    std::vector<Slot> slots;
    for (auto& t : m.nominal_ops) {
      for (auto& v : t.values) slots.push_back({n, {&v}, {}});
    }
    for (auto& t : m.nominal_rels) {
      for (auto& b : t.bits) slots.push_back({2, {}, {&b}});
    }
    for (std::size_t i = 0; i < sig.ops.size(); ++i) {
      const DataOp& f = sig.ops[i];
      for (World w = 0; w < (f.rigid ? 1 : n); ++w) {
        const std::size_t range = m.carrier(w, f.result).size();
        for (std::size_t off = 0; off < m.locals[w].ops[i].size(); ++off) {
          Slot slot{range, {}, {}};
          if (f.rigid) {
            for (World v = 0; v < n; ++v) slot.op_cells.push_back(&m.locals[v].ops[i].values[off]);
          } else {
            slot.op_cells.push_back(&m.locals[w].ops[i].values[off]);
          }
          slots.push_back(std::move(slot));
        }
      }
    }
    for (std::size_t i = 0; i < sig.rels.size(); ++i) {
      const DataRel& r = sig.rels[i];
      for (World w = 0; w < (r.rigid ? 1 : n); ++w) {
        for (std::size_t off = 0; off < m.locals[w].rels[i].size(); ++off) {
          Slot slot{2, {}, {}};
          if (r.rigid) {
            for (World v = 0; v < n; ++v) slot.rel_cells.push_back(&m.locals[v].rels[i].bits[off]);
          } else {
            slot.rel_cells.push_back(&m.locals[w].rels[i].bits[off]);
          }
          slots.push_back(std::move(slot));
        }
      }
    }
    for (const auto& s : slots) {
      if (s.range == 0) return true;  // an operation into an empty carrier has no table
    }
    std::vector<std::size_t> digits(slots.size(), 0);
    for (const auto& s : slots) s.write(0);
    while (true) {
      if (!visit(m)) return false;
      std::size_t d = 0;
      while (d < digits.size() && digits[d] + 1 == slots[d].range) {
        digits[d] = 0;
        slots[d].write(0);
        ++d;
      }
      if (d == digits.size()) break;
      slots[d].write(++digits[d]);
    }
    return true;
  });
}

std::vector<KripkeModel> models_of(const Signature& sig, const std::vector<Sentence>& gamma, std::size_t max_worlds,
                                   std::size_t max_carrier) {
  std::vector<KripkeModel> out;
  enumerate_models(sig, max_worlds, max_carrier, [&](const KripkeModel& m) {
    for (const auto& g : gamma) {
      if (!satisfies_everywhere(m, g)) return true;
    }
    out.push_back(m);
    return true;
  });
  return out;
}

bool holds_in_all(const std::vector<KripkeModel>& models, const Sentence& g) {
  for (const auto& m : models) {
    if (!satisfies_everywhere(m, g)) return false;
  }
  return true;
}

}  // namespace testing
