#include "hdfol/frontend/parser.hpp"

#include <algorithm>
#include <utility>

#include "hdfol/frontend/lexer.hpp"
#include "hdfol/wellformed.hpp"

namespace hdfol {

namespace {

using Ambient = std::optional<NominalTerm>;

Diagnostics with_span(Diagnostics diags, SourceSpan span) {
  for (auto& d : diags) {
    if (!d.span.known()) d.span = span;
  }
  return diags;
}

// Sides of an implication before the `=>` is seen.
struct Chain {
  std::vector<Sentence> items;
  bool chain = false;  // two or more conjuncts joined by /\.
  Sentence value;
};

struct ModelEntry {
  Token head;
  std::vector<Token> args;
  std::optional<Token> value;
  bool carrier = false;
  std::vector<Token> elements;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}
  Parser(std::string_view text, Signature sig) : toks_(tokenize(text)), sig_(std::move(sig)) {}

  void bind(const VariableBlock& vars) {
    for (const auto& z : vars.nominal) scope_.push_back({z, std::nullopt});
    for (const auto& x : vars.rigid) scope_.push_back({x.name, x.sort});
  }

  const Signature& signature() const { return sig_; }

  bool at_end() const { return toks_[pos_].kind == Token::Kind::End; }
  void expect_end() {
    if (!at_end()) fail("unexpected " + describe(peek()), peek());
  }
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

  // ---- declarations -------------------------------------------------------

  bool at_declaration() const {
    const Token& t = peek();
    return t.is_word("nominal") || t.is_word("modality") || t.is_word("rigid") || t.is_word("sort") || t.is_word("op") ||
           t.is_word("rel");
  }

  void declaration() {
    if (accept_word("nominal")) {
      if (accept_word("const")) {
        do {
          const Token& n = peek();
          add(n, [&](Signature& s) { s.nominal_ops.push_back({declared_name(), 0}); });
        } while (accept(","));
      } else if (accept_word("op")) {
        const Token& n = peek();
        std::string name = declared_name();
        expect(":");
        std::size_t arity = 0;
        if (!peek().is("->")) arity = world_list();
        expect("->");
        expect_world();
        add(n, [&](Signature& s) { s.nominal_ops.push_back({name, arity}); });
      } else if (accept_word("rel")) {
        const Token& n = peek();
        std::string name = declared_name();
        std::size_t arity = 0;
        if (accept(":")) arity = world_list();
        add(n, [&](Signature& s) { s.nominal_rels.push_back({name, arity}); });
      } else {
        fail("expected 'const', 'op' or 'rel' after 'nominal'", peek());
      }
    } else if (accept_word("modality")) {
      do {
        const Token& n = peek();
        add(n, [&](Signature& s) { s.nominal_rels.push_back({declared_name(), 2}); });
      } while (accept(","));
    } else {
      const bool rigid = accept_word("rigid");
      if (accept_word("sort")) {
        do {
          const Token& n = peek();
          add(n, [&](Signature& s) { s.sorts.push_back({declared_name(), rigid}); });
        } while (accept(","));
      } else if (accept_word("op")) {
        const Token& n = peek();
        DataOp op{declared_name(), {}, {}, rigid};
        expect(":");
        if (!peek().is("->")) op.args = sort_list();
        expect("->");
        op.result = sort_ref();
        add(n, [&](Signature& s) { s.ops.push_back(op); });
      } else if (accept_word("rel")) {
        const Token& n = peek();
        DataRel r{declared_name(), {}, rigid};
        if (accept(":")) r.args = sort_list();
        add(n, [&](Signature& s) { s.rels.push_back(r); });
      } else {
        fail(rigid ? "expected 'sort', 'op' or 'rel' after 'rigid'" : "expected a declaration", peek());
      }
    }
    expect(";");
  }

  // ---- sentences ----------------------------------------------------------

  Sentence clause() {
    Sentence g = sentence(std::nullopt);
    expect(";");
    return g;
  }

  Sentence sentence(const Ambient& amb) {
    if (at_binder()) return binder(amb);
    return implication(amb);
  }

  Query query() {
    Query q;
    if (accept_word("exists")) {
      q.vars = var_block();
      expect(".");
    }
    const std::size_t mark = scope_.size();
    bind(q.vars);
    const Token& start = peek();
    Sentence body = sentence(std::nullopt);
    scope_.resize(mark);
    expect_end();
    std::vector<Sentence> items;
    if (body.kind == Sentence::Kind::And) items = std::move(body.body);
    else items.push_back(std::move(body));
    for (const auto& e : items) {
      if (!e.is_atom_or_action()) fail("query body must be atomic", start);
    }
    q.body = std::move(items);
    return q;
  }

  Action action() {
    Action a = action_seq();
    while (accept("+")) a = alt(std::move(a), action_seq());
    return a;
  }

  NominalTerm nominal_term() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word) fail("expected a nominal term, found " + describe(t), t);
    if (const Bound* b = lookup(t.text)) {
      if (b->sort) fail("data variable '" + t.text + "' used as a nominal term", t);
      ++pos_;
      return nom_var(t.text);
    }
    const NominalSymbol* f = sig_.find_nominal_op(t.text);
    if (f == nullptr) {
      if (sig_.declares(t.text)) fail("'" + t.text + "' is not a nominal operation", t);
      fail("undeclared symbol '" + t.text + "'", t);
    }
    ++pos_;
    std::vector<NominalTerm> args;
    if (f->arity > 0) {
      expect("(");
      do args.push_back(nominal_term());
      while (accept(","));
      expect(")");
      if (args.size() != f->arity) fail(arity_message(t.text, f->arity, args.size()), t);
    }
    return nom(t.text, std::move(args));
  }

  // Untagged flexible applications keep an empty tag until resolve().
  HybridTerm raw_term() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word) fail("expected a term, found " + describe(t), t);
    if (const Bound* b = lookup(t.text)) {
      if (!b->sort) fail("nominal variable '" + t.text + "' used as a data term", t);
      ++pos_;
      return data_var(t.text, *b->sort);
    }
    const DataOp* f = sig_.find_op(t.text);
    if (f == nullptr) {
      if (sig_.declares(t.text)) fail("'" + t.text + "' is not a data operation", t);
      fail("undeclared symbol '" + t.text + "'", t);
    }
    ++pos_;
    HybridTerm out;
    out.kind = f->rigid ? HybridTerm::Kind::Rigid : HybridTerm::Kind::Flex;
    out.symbol = t.text;
    if (!f->rigid && accept("@")) out.tag = nominal_term();
    out.args = term_args(t, f->args.size());
    return out;
  }

  void resolve(HybridTerm& t, const Ambient& amb, const Token& where) {
    if (t.kind == HybridTerm::Kind::Flex) {
      if (!t.tag) {
        if (!amb) fail("flexible operation '" + t.symbol + "' needs a world tag", where);
        t.tag = amb;
      }
      for (auto& a : t.args) resolve(a, t.tag, where);
      return;
    }
    for (auto& a : t.args) resolve(a, amb, where);
  }

  // ---- models -------------------------------------------------------------

  KripkeModel model() {
    const Token& kw = peek();
    if (!accept_word("model")) fail("expected 'model', found " + describe(kw), kw);
    expect("{");
    std::optional<std::vector<Token>> worlds;
    std::vector<ModelEntry> nominal_entries;
    std::vector<ModelEntry> rigid_entries;
    std::vector<std::pair<Token, std::vector<ModelEntry>>> world_blocks;
    while (!accept("}")) {
      const Token& t = peek();
      if (accept_word("worlds")) {
        if (worlds) fail("world set given twice", t);
        worlds.emplace();
        do worlds->push_back(name_token());
        while (accept(","));
        expect(";");
      } else if (t.is_word("rigid") && peek(1).is("{")) {
        pos_ += 2;
        while (!accept("}")) rigid_entries.push_back(entry());
      } else if (t.is_word("world") && !peek(1).is("=") && !peek(1).is("(")) {
        ++pos_;
        Token w = name_token();
        expect("{");
        std::vector<ModelEntry> entries;
        while (!accept("}")) entries.push_back(entry());
        world_blocks.emplace_back(std::move(w), std::move(entries));
      } else {
        nominal_entries.push_back(entry());
      }
    }
    if (!worlds) fail("model has no 'worlds' declaration", kw);
    return build_model(kw, *worlds, nominal_entries, rigid_entries, world_blocks);
  }

 private:
  struct Bound {
    std::string name;
    std::optional<std::string> sort;  // empty for nominal variables
  };

  [[noreturn]] static void fail(const std::string& message, const Token& t) { throw Error(message, t.span); }

  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::End) return "end of input";
    if (t.kind == Token::Kind::String) return "string \"" + t.text + "\"";
    return "'" + t.text + "'";
  }

  static std::string arity_message(const std::string& name, std::size_t want, std::size_t got) {
    return "'" + name + "' expects " + std::to_string(want) + " argument" + (want == 1 ? "" : "s") + ", got " +
           std::to_string(got);
  }

  bool accept(std::string_view punct) {
    if (!peek().is(punct)) return false;
    ++pos_;
    return true;
  }
  bool accept_word(std::string_view word) {
    if (!peek().is_word(word)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail("expected '" + std::string(punct) + "', found " + describe(peek()), peek());
  }

  const Bound* lookup(std::string_view name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }

  std::string declared_name() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word || !is_identifier(t.text) || is_keyword(t.text) || t.text == kWorldSort) {
      fail("expected a symbol name, found " + describe(t), t);
    }
    if (sig_.declares(t.text)) fail("duplicate declaration of '" + t.text + "'", t);
    ++pos_;
    return t.text;
  }

  // Applies a declaration and rejects it if the signature stops being valid.
  template <typename F>
  void add(const Token& at, F&& change) {
    Signature next = sig_;
    change(next);
    Diagnostics diags = validate_signature(next);
    if (!diags.empty()) fail(diags.front().message, at);
    sig_ = std::move(next);
  }

  void expect_world() {
    if (!accept_word(kWorldSort)) fail("expected 'world', found " + describe(peek()), peek());
  }

  std::size_t world_list() {
    std::size_t n = 0;
    do {
      expect_world();
      ++n;
    } while (accept(","));
    return n;
  }

  std::string sort_ref() {
    const Token& t = peek();
    if (t.is_word(kWorldSort)) fail("data symbols cannot use the world sort", t);
    if (t.kind != Token::Kind::Word || sig_.find_sort(t.text) == nullptr) fail("undeclared sort " + describe(t), t);
    ++pos_;
    return t.text;
  }

  std::vector<std::string> sort_list() {
    std::vector<std::string> out;
    do out.push_back(sort_ref());
    while (accept(","));
    return out;
  }

  bool at_binder() const {
    const Token& t = peek();
    return t.is_word("forall") || t.is_word("exists") || t.is_word("store") || t.is_word("next") || t.is("@");
  }

  std::string variable_name() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word || !is_identifier(t.text) || is_keyword(t.text) || t.text == kWorldSort) {
      fail("expected a variable name, found " + describe(t), t);
    }
    if (sig_.declares(t.text)) fail("variable '" + t.text + "' clashes with a declared symbol", t);
    ++pos_;
    return t.text;
  }

  VariableBlock var_block() {
    VariableBlock vars;
    if (peek().is(".")) return vars;
    do {
      const Token& t = peek();
      std::string name = variable_name();
      if (vars.contains(name)) fail("variable '" + name + "' bound twice", t);
      expect(":");
      if (accept_word(kWorldSort)) {
        vars.nominal.push_back(std::move(name));
      } else {
        const Token& s = peek();
        std::string sort = sort_ref();
        if (!sig_.is_rigid_sort(sort)) fail("variables must range over rigid sorts; '" + sort + "' is flexible", s);
        vars.rigid.push_back({std::move(name), std::move(sort)});
      }
    } while (accept(","));
    return vars;
  }

  Sentence binder(const Ambient& amb) {
    const Token& t = peek();
    ++pos_;
    const std::size_t mark = scope_.size();
    Sentence out;
    if (t.is_word("forall") || t.is_word("exists")) {
      VariableBlock vars = var_block();
      expect(".");
      bind(vars);
      Sentence body = sentence(amb);
      out = t.is_word("forall") ? forall(std::move(vars), std::move(body)) : exists(std::move(vars), std::move(body));
    } else if (t.is_word("store")) {
      std::string z = variable_name();
      expect(".");
      scope_.push_back({z, std::nullopt});
      Sentence body = sentence(nom_var(z));
      out = store(std::move(z), std::move(body));
    } else if (t.is("@")) {
      NominalTerm k = nominal_term();
      expect(".");
      Sentence body = sentence(k);
      out = at(std::move(k), std::move(body));
    } else {
      const Token& f = peek();
      const NominalSymbol* op = f.kind == Token::Kind::Word ? sig_.find_nominal_op(f.text) : nullptr;
      if (op == nullptr || op->arity != 1) fail("expected a unary nominal operation, found " + describe(f), f);
      ++pos_;
      expect(".");
      Ambient next;
      if (amb) next = nom(f.text, {*amb});
      out = next_op(f.text, sentence(next));
    }
    scope_.resize(mark);
    return out;
  }

  Sentence implication(const Ambient& amb) {
    if (peek().is_word("true") && peek(1).is("=>")) {
      pos_ += 2;
      return implies({}, sentence(amb));
    }
    Chain lhs = disjunction(amb);
    if (accept("=>")) {
      std::vector<Sentence> hyps = lhs.chain ? std::move(lhs.items) : std::vector<Sentence>{std::move(lhs.value)};
      return implies(std::move(hyps), sentence(amb));
    }
    return std::move(lhs.value);
  }

  Chain disjunction(const Ambient& amb) {
    Chain first = conjunction(amb);
    if (!peek().is("\\/")) return first;
    std::vector<Sentence> negated{negation(std::move(first.value))};
    while (accept("\\/")) negated.push_back(negation(conjunction(amb).value));
    Sentence g = negation(conj(std::move(negated)));
    return {{g}, false, g};
  }

  Chain conjunction(const Ambient& amb) {
    std::vector<Sentence> items{unary(amb)};
    while (accept("/\\")) items.push_back(unary(amb));
    if (items.size() == 1) return {items, false, items.front()};
    Sentence g = conj(items);
    return {std::move(items), true, std::move(g)};
  }

  Sentence unary(const Ambient& amb) {
    if (accept_word("not")) return negation(unary(amb));
    if (accept("[")) {
      Action a = action();
      expect("]");
      return nec(std::move(a), unary(std::nullopt));
    }
    if (accept("/\\")) return conj({unary(amb)});
    if (at_binder()) return binder(amb);
    return primary(amb);
  }

  Sentence primary(const Ambient& amb) {
    const Token& t = peek();
    if (accept_word("true")) return truth();
    if (t.is("(")) {
      const std::size_t save = pos_;
      std::optional<Action> a;
      try {
        ++pos_;
        Action x = action();
        expect(")");
        while (accept("*")) x = star(std::move(x));
        if (peek().is("(")) a = std::move(x);
      } catch (const Error&) {
      }
      if (a) return action_relation(std::move(*a));
      pos_ = save + 1;
      Sentence g = sentence(amb);
      expect(")");
      return g;
    }
    if (t.kind != Token::Kind::Word || is_keyword(t.text)) fail("expected a sentence, found " + describe(t), t);
    return atom(amb);
  }

  Sentence action_relation(Action a) {
    expect("(");
    NominalTerm k1 = nominal_term();
    expect(",");
    NominalTerm k2 = nominal_term();
    expect(")");
    return act_rel(std::move(a), std::move(k1), std::move(k2));
  }

  std::vector<HybridTerm> term_args(const Token& head, std::size_t arity) {
    std::vector<HybridTerm> args;
    if (arity == 0) return args;
    expect("(");
    do args.push_back(raw_term());
    while (accept(","));
    expect(")");
    if (args.size() != arity) fail(arity_message(head.text, arity, args.size()), head);
    return args;
  }

  std::string term_sort(const HybridTerm& t) const {
    if (t.kind == HybridTerm::Kind::Var) return t.sort;
    return sig_.find_op(t.symbol)->result;
  }

  Sentence atom(const Ambient& amb) {
    const Token& t = peek();
    const std::string& name = t.text;
    const Bound* b = lookup(name);
    if ((b != nullptr && !b->sort) || (b == nullptr && sig_.find_nominal_op(name) != nullptr)) {
      NominalTerm k1 = nominal_term();
      expect("=");
      NominalTerm k2 = nominal_term();
      return nom_eq(std::move(k1), std::move(k2));
    }
    if (b == nullptr && sig_.is_modality(name) && peek(1).is("*")) {
      ++pos_;
      Action a = modality(name);
      while (accept("*")) a = star(std::move(a));
      return action_relation(std::move(a));
    }
    if (b == nullptr) {
      if (const NominalSymbol* r = sig_.find_nominal_rel(name)) {
        ++pos_;
        std::vector<NominalTerm> args;
        if (r->arity > 0) {
          expect("(");
          do args.push_back(nominal_term());
          while (accept(","));
          expect(")");
          if (args.size() != r->arity) fail(arity_message(name, r->arity, args.size()), t);
        }
        return nom_rel(name, std::move(args));
      }
      if (const DataRel* r = sig_.find_rel(name)) {
        ++pos_;
        if (r->rigid) {
          std::vector<HybridTerm> args = term_args(t, r->args.size());
          for (auto& a : args) resolve(a, amb, t);
          return rigid_rel(name, std::move(args));
        }
        Ambient index = amb;
        if (accept("@")) index = nominal_term();
        std::vector<HybridTerm> args = term_args(t, r->args.size());
        if (!index) fail("flexible relation '" + name + "' needs a world index", t);
        for (auto& a : args) resolve(a, index, t);
        return flex_rel(name, std::move(*index), std::move(args));
      }
    }
    HybridTerm lhs = raw_term();
    const Token& eq = peek();
    expect("=");
    Ambient index = amb;
    if (accept("[")) {
      index = nominal_term();
      expect("]");
    }
    HybridTerm rhs = raw_term();
    if (!index) fail("equation needs a world index", eq);
    resolve(lhs, index, t);
    resolve(rhs, index, t);
    std::string sort = term_sort(lhs);
    return hyb_eq(std::move(*index), std::move(sort), std::move(lhs), std::move(rhs));
  }

  Action action_seq() {
    Action a = action_star();
    while (accept(";")) a = seq(std::move(a), action_star());
    return a;
  }

  Action action_star() {
    Action a = action_atom();
    while (accept("*")) a = star(std::move(a));
    return a;
  }

  Action action_atom() {
    if (accept("(")) {
      Action a = action();
      expect(")");
      return a;
    }
    const Token& t = peek();
    if (t.kind != Token::Kind::Word || !sig_.is_modality(t.text)) fail("expected a modality, found " + describe(t), t);
    ++pos_;
    return modality(t.text);
  }

  Token name_token() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word && t.kind != Token::Kind::String) fail("expected a name, found " + describe(t), t);
    ++pos_;
    return t;
  }

  ModelEntry entry() {
    ModelEntry e;
    e.head = name_token();
    if (peek().is("=") && peek(1).is("{")) {
      pos_ += 2;
      e.carrier = true;
      if (!peek().is("}")) {
        do e.elements.push_back(name_token());
        while (accept(","));
      }
      expect("}");
      expect(";");
      return e;
    }
    if (accept("(")) {
      do e.args.push_back(name_token());
      while (accept(","));
      expect(")");
    }
    if (accept("=")) e.value = name_token();
    expect(";");
    return e;
  }

  KripkeModel build_model(const Token& kw, const std::vector<Token>& world_tokens,
                          const std::vector<ModelEntry>& nominal_entries, const std::vector<ModelEntry>& rigid_entries,
                          const std::vector<std::pair<Token, std::vector<ModelEntry>>>& world_blocks) {
    std::vector<std::string> worlds;
    for (const auto& t : world_tokens) {
      if (std::find(worlds.begin(), worlds.end(), t.text) != worlds.end()) fail("duplicate world name '" + t.text + "'", t);
      worlds.push_back(t.text);
    }
    if (worlds.empty()) fail("empty world set", kw);
    auto world_of = [&](const Token& t) {
      auto it = std::find(worlds.begin(), worlds.end(), t.text);
      if (it == worlds.end()) fail("unknown world '" + t.text + "'", t);
      return static_cast<std::size_t>(it - worlds.begin());
    };

    const std::size_t nsorts = sig_.sorts.size();
    std::vector<std::vector<std::vector<std::string>>> carriers(
        worlds.size(), std::vector<std::vector<std::string>>(nsorts));
    std::vector<std::vector<const ModelEntry*>> by_world(worlds.size());
    std::vector<std::uint8_t> seen(worlds.size(), 0);
    for (const auto& [w, entries] : world_blocks) {
      const std::size_t i = world_of(w);
      if (seen[i]) fail("world '" + w.text + "' given twice", w);
      seen[i] = 1;
      for (const auto& e : entries) by_world[i].push_back(&e);
    }

    auto set_carrier = [&](const ModelEntry& e, bool rigid, std::vector<std::vector<std::string>>& out) {
      const SortDecl* s = sig_.find_sort(e.head.text);
      if (s->rigid != rigid) {
        fail(rigid ? "flexible sort '" + e.head.text + "' given in the rigid block"
                   : "rigid symbol '" + e.head.text + "' given per-world values",
             e.head);
      }
      const std::size_t idx = static_cast<std::size_t>(s - sig_.sorts.data());
      if (!out[idx].empty()) fail("carrier of '" + e.head.text + "' given twice", e.head);
      for (const auto& el : e.elements) {
        if (std::find(out[idx].begin(), out[idx].end(), el.text) != out[idx].end()) {
          fail("duplicate element '" + el.text + "'", el);
        }
        out[idx].push_back(el.text);
      }
    };
    auto is_sort_entry = [&](const ModelEntry& e) {
      if (!e.carrier) return false;
      if (sig_.find_sort(e.head.text) == nullptr) fail("undeclared sort '" + e.head.text + "'", e.head);
      return true;
    };

    std::vector<std::vector<std::string>> rigid_carriers(nsorts);
    for (const auto& e : rigid_entries) {
      if (is_sort_entry(e)) set_carrier(e, true, rigid_carriers);
    }
    for (std::size_t w = 0; w < worlds.size(); ++w) {
      for (const ModelEntry* e : by_world[w]) {
        if (is_sort_entry(*e)) set_carrier(*e, false, carriers[w]);
      }
      for (std::size_t s = 0; s < nsorts; ++s) {
        if (sig_.sorts[s].rigid) carriers[w][s] = rigid_carriers[s];
      }
    }

    KripkeModel m = make_model(sig_, worlds, carriers);

    auto element = [&](std::size_t w, const std::string& sort, const Token& t) {
      const auto& c = m.carrier(w, sort);
      auto it = std::find(c.begin(), c.end(), t.text);
      if (it == c.end()) fail("unknown element '" + t.text + "' of sort '" + sort + "'", t);
      return static_cast<std::size_t>(it - c.begin());
    };
    auto check_count = [&](const ModelEntry& e, std::size_t want) {
      if (e.args.size() != want) fail(arity_message(e.head.text, want, e.args.size()), e.head);
    };

    for (const auto& e : nominal_entries) {
      if (e.carrier) fail("carrier '" + e.head.text + "' must be given in a rigid or world block", e.head);
      const std::string& name = e.head.text;
      if (const NominalSymbol* f = sig_.find_nominal_op(name)) {
        check_count(e, f->arity);
        if (!e.value) fail("missing value for nominal operation '" + name + "'", e.head);
        std::vector<std::size_t> args;
        for (const auto& a : e.args) args.push_back(world_of(a));
        OpTable& t = m.nominal_ops[static_cast<std::size_t>(f - sig_.nominal_ops.data())];
        const std::size_t v = world_of(*e.value);
        if (t.at(args) != OpTable::kUndefined && t.at(args) != static_cast<std::int64_t>(v)) {
          fail("conflicting values for '" + name + "'", e.head);
        }
        t.set(args, v);
      } else if (const NominalSymbol* r = sig_.find_nominal_rel(name)) {
        check_count(e, r->arity);
        if (e.value) fail("relation '" + name + "' takes no value", *e.value);
        std::vector<std::size_t> args;
        for (const auto& a : e.args) args.push_back(world_of(a));
        m.nominal_rels[static_cast<std::size_t>(r - sig_.nominal_rels.data())].insert(args);
      } else if (sig_.declares(name)) {
        fail("data symbol '" + name + "' must be given in a rigid or world block", e.head);
      } else {
        fail("undeclared symbol '" + name + "'", e.head);
      }
    }

    // Data entries of one block; rigid ones are copied into every world.
    auto data_entry = [&](const ModelEntry& e, std::optional<std::size_t> world) {
      const std::string& name = e.head.text;
      const bool rigid_block = !world.has_value();
      const std::size_t w0 = world.value_or(0);
      if (const DataOp* f = sig_.find_op(name)) {
        if (f->rigid != rigid_block) {
          fail(rigid_block ? "flexible symbol '" + name + "' given in the rigid block"
                           : "rigid symbol '" + name + "' given per-world values",
               e.head);
        }
        check_count(e, f->args.size());
        if (!e.value) fail("missing value for operation '" + name + "'", e.head);
        std::vector<std::size_t> args;
        for (std::size_t i = 0; i < e.args.size(); ++i) args.push_back(element(w0, f->args[i], e.args[i]));
        const std::size_t v = element(w0, f->result, *e.value);
        const std::size_t idx = static_cast<std::size_t>(f - sig_.ops.data());
        for (std::size_t w = 0; w < worlds.size(); ++w) {
          if (world && w != *world) continue;
          OpTable& t = m.locals[w].ops[idx];
          if (t.at(args) != OpTable::kUndefined && t.at(args) != static_cast<std::int64_t>(v)) {
            fail("conflicting values for '" + name + "'", e.head);
          }
          t.set(args, v);
        }
      } else if (const DataRel* r = sig_.find_rel(name)) {
        if (r->rigid != rigid_block) {
          fail(rigid_block ? "flexible symbol '" + name + "' given in the rigid block"
                           : "rigid symbol '" + name + "' given per-world values",
               e.head);
        }
        check_count(e, r->args.size());
        if (e.value) fail("relation '" + name + "' takes no value", *e.value);
        std::vector<std::size_t> args;
        for (std::size_t i = 0; i < e.args.size(); ++i) args.push_back(element(w0, r->args[i], e.args[i]));
        const std::size_t idx = static_cast<std::size_t>(r - sig_.rels.data());
        for (std::size_t w = 0; w < worlds.size(); ++w) {
          if (world && w != *world) continue;
          m.locals[w].rels[idx].insert(args);
        }
      } else if (sig_.declares(name)) {
        fail("nominal symbol '" + name + "' must be given outside rigid and world blocks", e.head);
      } else {
        fail("undeclared symbol '" + name + "'", e.head);
      }
    };
    for (const auto& e : rigid_entries) {
      if (!e.carrier) data_entry(e, std::nullopt);
    }
    for (std::size_t w = 0; w < worlds.size(); ++w) {
      for (const ModelEntry* e : by_world[w]) {
        if (!e->carrier) data_entry(*e, w);
      }
    }

    if (Diagnostics diags = validate_model(sig_, m); !diags.empty()) throw Error(with_span(std::move(diags), kw.span));
    return m;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Signature sig_;
  std::vector<Bound> scope_;

 public:
  // Skips to just past the ';' that ends the item starting at `start`. A ';'
  // at the end of a line also ends it, so an unclosed bracket loses one line.
  void recover(std::size_t start) {
    int depth = 0;
    std::size_t i = start;
    for (; toks_[i].kind != Token::Kind::End; ++i) {
      const Token& t = toks_[i];
      if (t.is("(") || t.is("[") || t.is("{")) ++depth;
      if (t.is(")") || t.is("]") || t.is("}")) depth = std::max(0, depth - 1);
      if (t.is(";") && (depth == 0 || toks_[i + 1].span.line > t.span.line)) {
        ++i;
        break;
      }
    }
    pos_ = std::min(std::max(i, start + 1), toks_.size() - 1);
  }
  std::size_t position() const { return pos_; }
};

template <typename F>
auto guarded(F&& f) -> Result<decltype(f())> {
  try {
    return f();
  } catch (const Error& e) {
    return e.diagnostics();
  }
}

}  // namespace

Result<Theory> parse_theory(std::string_view text) {
  return guarded([&]() -> Theory {
    Parser p(text);
    Diagnostics diags;
    std::vector<std::pair<Sentence, SourceSpan>> clauses;
    while (!p.at_end()) {
      const std::size_t start = p.position();
      const SourceSpan span = p.peek().span;
      try {
        if (p.at_declaration()) p.declaration();
        else clauses.emplace_back(p.clause(), span);
      } catch (const Error& e) {
        for (const auto& d : e.diagnostics()) diags.push_back(d);
        p.recover(start);
      }
    }
    Theory theory{p.signature(), {}};
    for (auto& [g, span] : clauses) {
      Diagnostics ds = check_sentence(theory.signature, g);
      if (ds.empty()) ds = validate_horn_clause(g);
      for (auto& d : with_span(std::move(ds), span)) diags.push_back(std::move(d));
      theory.clauses.push_back(std::move(g));
    }
    if (!diags.empty()) throw Error(std::move(diags));
    return theory;
  });
}

Result<Signature> parse_signature(std::string_view text) {
  return guarded([&]() -> Signature {
    Parser p(text);
    while (!p.at_end()) {
      if (!p.at_declaration()) throw Error("expected a declaration", p.peek().span);
      p.declaration();
    }
    return p.signature();
  });
}

Result<KripkeModel> parse_model(std::string_view text, const Signature& sig) {
  return guarded([&]() -> KripkeModel {
    if (Diagnostics diags = validate_signature(sig); !diags.empty()) throw Error(std::move(diags));
    Parser p(text, sig);
    KripkeModel m = p.model();
    p.expect_end();
    return m;
  });
}

Result<KripkeModel> parse_model_file(std::string_view text) {
  return guarded([&]() -> KripkeModel {
    Parser p(text);
    while (p.at_declaration()) p.declaration();
    KripkeModel m = p.model();
    p.expect_end();
    return m;
  });
}

Result<Sentence> parse_sentence(std::string_view text, const Signature& sig, const VariableBlock& scope,
                                const std::optional<NominalTerm>& ambient) {
  return guarded([&]() -> Sentence {
    Parser p(text, sig);
    p.bind(scope);
    const SourceSpan span = p.peek().span;
    Sentence g = p.sentence(ambient);
    p.expect_end();
    if (Diagnostics diags = check_sentence(sig, g, scope); !diags.empty()) throw Error(with_span(std::move(diags), span));
    return g;
  });
}

Result<Query> parse_query(std::string_view text, const Signature& sig) {
  return guarded([&]() -> Query {
    Parser p(text, sig);
    const SourceSpan span = p.peek().span;
    Query q = p.query();
    if (Diagnostics diags = validate_query(sig, q); !diags.empty()) throw Error(with_span(std::move(diags), span));
    return q;
  });
}

Result<Action> parse_action(std::string_view text, const Signature& sig) {
  return guarded([&]() -> Action {
    Parser p(text, sig);
    Action a = p.action();
    p.expect_end();
    return a;
  });
}

Result<NominalTerm> parse_nominal_term(std::string_view text, const Signature& sig, const VariableBlock& scope) {
  return guarded([&]() -> NominalTerm {
    Parser p(text, sig);
    p.bind(scope);
    NominalTerm k = p.nominal_term();
    p.expect_end();
    return k;
  });
}

Result<HybridTerm> parse_hybrid_term(std::string_view text, const Signature& sig, const VariableBlock& scope,
                                     const std::optional<NominalTerm>& ambient) {
  return guarded([&]() -> HybridTerm {
    Parser p(text, sig);
    p.bind(scope);
    const Token first = p.peek();
    HybridTerm t = p.raw_term();
    p.resolve(t, ambient, first);
    p.expect_end();
    return t;
  });
}

bool looks_like_model_file(std::string_view text) {
  try {
    const auto toks = tokenize(text);
    return std::any_of(toks.begin(), toks.end(), [](const Token& t) { return t.is_word("model"); });
  } catch (const Error&) {
    return false;
  }
}

}  // namespace hdfol
