#include "hdfol/frontend/printer.hpp"

#include <algorithm>
#include <cctype>

#include "hdfol/frontend/lexer.hpp"

namespace hdfol {

namespace {

using Ambient = std::optional<NominalTerm>;

template <typename T, typename F>
std::string join(const std::vector<T>& items, const std::string& sep, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += f(items[i]);
  }
  return out;
}

std::string action_at(const Action& a, int level) {
  switch (a.kind) {
    case Action::Kind::Modality:
      return a.modality;
    case Action::Kind::Union: {
      std::string s = action_at(a.parts[0], 0) + " + " + action_at(a.parts[1], 1);
      return level > 0 ? "(" + s + ")" : s;
    }
    case Action::Kind::Seq: {
      std::string s = action_at(a.parts[0], 1) + ";" + action_at(a.parts[1], 2);
      return level > 1 ? "(" + s + ")" : s;
    }
    case Action::Kind::Star:
      return action_at(a.parts[0], 3) + "*";
  }
  return {};
}

bool is_exists(const Sentence& g) {
  return g.kind == Sentence::Kind::Not && g.sub().kind == Sentence::Kind::Forall &&
         g.sub().sub().kind == Sentence::Kind::Not;
}

bool is_binder(const Sentence& g) {
  using K = Sentence::Kind;
  return g.kind == K::At || g.kind == K::Store || g.kind == K::Forall || g.kind == K::Next || is_exists(g);
}

std::string sentence(const Sentence& g, const Ambient& amb);

std::string terms(const std::vector<HybridTerm>& ts, const Ambient& amb) {
  return join(ts, ", ", [&](const HybridTerm& t) { return print(t, amb); });
}

std::string atom(const Sentence& g, const Ambient& amb) {
  using K = Sentence::Kind;
  switch (g.kind) {
    case K::NomEq:
      return print(g.nominals[0]) + " = " + print(g.nominals[1]);
    case K::NomRel:
      if (g.nominals.empty()) return g.symbol;
      return g.symbol + "(" + join(g.nominals, ", ", [](const NominalTerm& k) { return print(k); }) + ")";
    case K::HybEq: {
      const std::string eq = amb == g.index() ? " = " : " =[" + print(g.index()) + "] ";
      return print(g.terms[0], g.index()) + eq + print(g.terms[1], g.index());
    }
    case K::RigidRel:
      return g.terms.empty() ? g.symbol : g.symbol + "(" + terms(g.terms, amb) + ")";
    case K::FlexRel: {
      std::string head = amb == g.index() ? g.symbol : g.symbol + "@" + print(g.index());
      return g.terms.empty() ? head : head + "(" + terms(g.terms, g.index()) + ")";
    }
    case K::ActRel: {
      const Action& a = *g.action;
      std::string head = a.kind == Action::Kind::Star ? print(a) : "(" + print(a) + ")";
      return head + "(" + print(g.nominals[0]) + ", " + print(g.nominals[1]) + ")";
    }
    default:
      return {};
  }
}

// Operand of `not`, `[a]` or a conjunction.
std::string unary(const Sentence& g, const Ambient& amb) {
  using K = Sentence::Kind;
  if (g.is_atom_or_action()) return atom(g, amb);
  if (is_binder(g) || g.kind == K::Implies) return "(" + sentence(g, amb) + ")";
  switch (g.kind) {
    case K::Not:
      return "not " + unary(g.sub(), amb);
    case K::Nec:
      return "[" + print(*g.action) + "] " + unary(g.sub(), std::nullopt);
    case K::And:
      if (g.body.empty()) return "true";
      if (g.body.size() == 1) return "/\\ " + unary(g.sub(), amb);
      return "(" + sentence(g, amb) + ")";
    default:
      return "(" + sentence(g, amb) + ")";
  }
}

std::string hypothesis(const Sentence& h, const Ambient& amb) {
  if (h.kind == Sentence::Kind::And && h.body.empty()) return "(true)";
  return unary(h, amb);
}

std::string quantifier(const std::string& word, const VariableBlock& vars) {
  return vars.empty() ? word + " . " : word + " " + print(vars) + " . ";
}

std::string sentence(const Sentence& g, const Ambient& amb) {
  using K = Sentence::Kind;
  if (is_exists(g)) {
    const Sentence& f = g.sub();
    return quantifier("exists", f.vars) + sentence(f.sub().sub(), amb);
  }
  switch (g.kind) {
    case K::At:
      return "@ " + print(g.index()) + " . " + sentence(g.sub(), g.index());
    case K::Store:
      return "store " + g.symbol + " . " + sentence(g.sub(), nom_var(g.symbol));
    case K::Forall:
      return quantifier("forall", g.vars) + sentence(g.sub(), amb);
    case K::Next: {
      Ambient next;
      if (amb) next = nom(g.symbol, {*amb});
      return "next " + g.symbol + " . " + sentence(g.sub(), next);
    }
    case K::Implies: {
      std::string lhs = g.hypotheses.empty()
                            ? std::string("true")
                            : join(g.hypotheses, " /\\ ", [&](const Sentence& h) { return hypothesis(h, amb); });
      return lhs + " => " + sentence(g.sub(), amb);
    }
    case K::And:
      if (g.body.size() >= 2) return join(g.body, " /\\ ", [&](const Sentence& b) { return unary(b, amb); });
      return unary(g, amb);
    default:
      return unary(g, amb);
  }
}

std::string sort_list(const std::vector<std::string>& sorts) { return join(sorts, ", ", [](const std::string& s) { return s; }); }

std::string world_list(std::size_t arity) {
  return join(std::vector<std::string>(arity, std::string(kWorldSort)), ", ", [](const std::string& s) { return s; });
}

std::string element_tuple(const std::vector<std::size_t>& args, const std::vector<const std::vector<std::string>*>& carriers) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out += ", ";
    out += print_name((*carriers[i])[args[i]]);
  }
  return out + ")";
}

}  // namespace

std::string print_name(const std::string& name) {
  const bool word = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
  if (word && !is_keyword(name)) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string print(const NominalTerm& k) {
  if (k.args.empty()) return k.symbol;
  return k.symbol + "(" + join(k.args, ", ", [](const NominalTerm& a) { return print(a); }) + ")";
}

std::string print(const HybridTerm& t, const std::optional<NominalTerm>& ambient) {
  std::string head = t.symbol;
  Ambient inner = ambient;
  if (t.kind == HybridTerm::Kind::Flex) {
    if (ambient != t.tag) head += "@" + print(*t.tag);
    inner = t.tag;
  }
  if (t.args.empty()) return head;
  return head + "(" + terms(t.args, inner) + ")";
}

std::string print(const Action& a) { return action_at(a, 0); }

std::string print(const Sentence& g, const std::optional<NominalTerm>& ambient) { return sentence(g, ambient); }

std::string print(const VariableBlock& vars) {
  std::vector<std::string> parts;
  for (const auto& z : vars.nominal) parts.push_back(z + ":" + std::string(kWorldSort));
  for (const auto& x : vars.rigid) parts.push_back(x.name + ":" + x.sort);
  return join(parts, ", ", [](const std::string& s) { return s; });
}

std::string print(const Query& q) {
  std::string body = q.body.empty() ? std::string("true")
                                    : join(q.body, " /\\ ", [](const Sentence& e) { return atom(e, std::nullopt); });
  if (q.vars.empty()) return body;
  return "exists " + print(q.vars) + " . " + body;
}

std::string print(const Signature& sig) {
  std::string out;
  for (const auto& f : sig.nominal_ops) {
    if (f.arity == 0) out += "nominal const " + f.name + ";\n";
    else out += "nominal op " + f.name + " : " + world_list(f.arity) + " -> world;\n";
  }
  for (const auto& r : sig.nominal_rels) {
    if (r.arity == 2) out += "modality " + r.name + ";\n";
    else if (r.arity == 0) out += "nominal rel " + r.name + ";\n";
    else out += "nominal rel " + r.name + " : " + world_list(r.arity) + ";\n";
  }
  for (const auto& s : sig.sorts) out += std::string(s.rigid ? "rigid " : "") + "sort " + s.name + ";\n";
  for (const auto& f : sig.ops) {
    out += std::string(f.rigid ? "rigid " : "") + "op " + f.name + " : ";
    out += f.args.empty() ? "-> " + f.result : sort_list(f.args) + " -> " + f.result;
    out += ";\n";
  }
  for (const auto& r : sig.rels) {
    out += std::string(r.rigid ? "rigid " : "") + "rel " + r.name;
    if (!r.args.empty()) out += " : " + sort_list(r.args);
    out += ";\n";
  }
  return out;
}

std::string print(const Theory& theory) {
  std::string out = print(theory.signature);
  if (!theory.clauses.empty()) out += "\n";
  for (const auto& g : theory.clauses) out += print(g) + ";\n";
  return out;
}

std::string print(const KripkeModel& m) {
  const Signature& sig = m.signature;
  std::string out = print(sig);
  if (!out.empty()) out += "\n";
  out += "model {\n";
  out += "  worlds " + join(m.worlds, ", ", [](const std::string& w) { return print_name(w); }) + ";\n";

  const std::vector<std::string>& worlds = m.worlds;
  auto world_tuple = [&](const std::vector<std::size_t>& args) {
    std::vector<const std::vector<std::string>*> carriers(args.size(), &worlds);
    return element_tuple(args, carriers);
  };
  for (std::size_t i = 0; i < sig.nominal_ops.size(); ++i) {
    const OpTable& t = m.nominal_ops[i];
    for (std::size_t off = 0; off < t.size(); ++off) {
      const auto args = t.arguments(off);
      const std::string lhs = args.empty() ? sig.nominal_ops[i].name : sig.nominal_ops[i].name + world_tuple(args);
      const std::int64_t v = t.values[off];
      out += "  " + lhs + " = " + (v < 0 ? std::string("?") : print_name(worlds[static_cast<std::size_t>(v)])) + ";\n";
    }
  }
  for (std::size_t i = 0; i < sig.nominal_rels.size(); ++i) {
    const RelTable& t = m.nominal_rels[i];
    for (std::size_t off = 0; off < t.size(); ++off) {
      if (!t.bits[off]) continue;
      const auto args = t.arguments(off);
      out += "  " + (args.empty() ? sig.nominal_rels[i].name : sig.nominal_rels[i].name + world_tuple(args)) + ";\n";
    }
  }

  // Carriers, op entries and relation tuples of one local model, filtered by rigidity.
  auto block = [&](const LocalModel& local, bool rigid, const std::string& indent) {
    std::string s;
    auto carriers_of = [&](const std::vector<std::string>& sorts) {
      std::vector<const std::vector<std::string>*> cs;
      for (const auto& so : sorts) cs.push_back(&local.carriers[m.sort_index(so)]);
      return cs;
    };
    for (std::size_t i = 0; i < sig.sorts.size(); ++i) {
      if (sig.sorts[i].rigid != rigid || local.carriers[i].empty()) continue;
      s += indent + sig.sorts[i].name + " = {" +
           join(local.carriers[i], ", ", [](const std::string& e) { return print_name(e); }) + "};\n";
    }
    for (std::size_t i = 0; i < sig.ops.size(); ++i) {
      const DataOp& f = sig.ops[i];
      if (f.rigid != rigid) continue;
      const OpTable& t = local.ops[i];
      const auto& result = local.carriers[m.sort_index(f.result)];
      const auto cs = carriers_of(f.args);
      for (std::size_t off = 0; off < t.size(); ++off) {
        const auto args = t.arguments(off);
        const std::string lhs = args.empty() ? f.name : f.name + element_tuple(args, cs);
        const std::int64_t v = t.values[off];
        s += indent + lhs + " = " + (v < 0 ? std::string("?") : print_name(result[static_cast<std::size_t>(v)])) + ";\n";
      }
    }
    for (std::size_t i = 0; i < sig.rels.size(); ++i) {
      const DataRel& r = sig.rels[i];
      if (r.rigid != rigid) continue;
      const RelTable& t = local.rels[i];
      const auto cs = carriers_of(r.args);
      for (std::size_t off = 0; off < t.size(); ++off) {
        if (!t.bits[off]) continue;
        const auto args = t.arguments(off);
        s += indent + (args.empty() ? r.name : r.name + element_tuple(args, cs)) + ";\n";
      }
    }
    return s;
  };
  if (!m.locals.empty()) {
    const std::string rigid = block(m.locals[0], true, "    ");
    if (!rigid.empty()) out += "  rigid {\n" + rigid + "  }\n";
  }
  for (World w = 0; w < m.locals.size(); ++w) {
    const std::string local = block(m.locals[w], false, "    ");
    if (!local.empty()) out += "  world " + print_name(worlds[w]) + " {\n" + local + "  }\n";
  }
  out += "}\n";
  return out;
}

}  // namespace hdfol
