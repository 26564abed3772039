#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdfol/signature.hpp"

namespace hdfol {

// Term over the nominal signature; variables are nominal variables (sort world).
struct NominalTerm {
  enum class Kind : std::uint8_t { App, Var };

  Kind kind = Kind::App;
  std::string symbol;
  std::vector<NominalTerm> args;

  bool is_var() const { return kind == Kind::Var; }

  bool operator==(const NominalTerm&) const = default;
  std::strong_ordering operator<=>(const NominalTerm&) const = default;
};

// World-indexed data term. Flexible applications carry their world tag
// explicitly; rigid applications and variables are world-independent.
struct HybridTerm {
  enum class Kind : std::uint8_t { Rigid, Flex, Var };

  Kind kind = Kind::Rigid;
  std::string symbol;
  std::optional<NominalTerm> tag;  // Flex only
  std::string sort;                // Var only
  std::vector<HybridTerm> args;

  bool operator==(const HybridTerm&) const = default;
  std::strong_ordering operator<=>(const HybridTerm&) const = default;
};

// Regular expression over modalities.
struct Action {
  enum class Kind : std::uint8_t { Modality, Seq, Union, Star };

  Kind kind = Kind::Modality;
  std::string modality;
  std::vector<Action> parts;  // Seq/Union: 2, Star: 1

  bool operator==(const Action&) const = default;
  std::strong_ordering operator<=>(const Action&) const = default;
};

struct Sentence {
  enum class Kind : std::uint8_t {
    NomEq,     // k1 = k2
    NomRel,    // lambda(k...)
    HybEq,     // t1 =_{k,s} t2
    RigidRel,  // varpi(t...)
    FlexRel,   // pi(k, t...)
    ActRel,    // a(k1, k2)
    At,        // @k . g
    Not,
    And,       // finite conjunction; empty means true
    Implies,   // /\H => g
    Store,     // store z . g
    Forall,    // forall X . g
    Nec,       // [a] g
    Next,      // next sigma . g
  };

  Kind kind = Kind::And;
  std::string symbol;                // relation, stored variable or `next` operation
  std::string sort;                  // HybEq
  std::vector<NominalTerm> nominals; // NomEq/NomRel/ActRel arguments; HybEq/FlexRel/At index
  std::vector<HybridTerm> terms;     // HybEq operands; RigidRel/FlexRel arguments
  std::optional<Action> action;      // ActRel, Nec
  VariableBlock vars;                // Forall
  std::vector<Sentence> hypotheses;  // Implies
  std::vector<Sentence> body;        // And: conjuncts; other connectives: exactly one

  const Sentence& sub() const { return body.front(); }
  const NominalTerm& index() const { return nominals.front(); }

  bool is_atom() const { return kind <= Kind::FlexRel; }
  bool is_atom_or_action() const { return kind <= Kind::ActRel; }

  bool operator==(const Sentence&) const = default;
  std::strong_ordering operator<=>(const Sentence&) const = default;
};

// Term constructors.
NominalTerm nom(std::string symbol, std::vector<NominalTerm> args = {});
NominalTerm nom_var(std::string name);
HybridTerm rigid_app(std::string symbol, std::vector<HybridTerm> args = {});
HybridTerm flex_app(std::string symbol, NominalTerm tag, std::vector<HybridTerm> args = {});
HybridTerm data_var(std::string name, std::string sort);

Action modality(std::string name);
Action seq(Action a, Action b);
Action alt(Action a, Action b);
Action star(Action a);

// Sentence constructors.
Sentence nom_eq(NominalTerm k1, NominalTerm k2);
Sentence nom_rel(std::string rel, std::vector<NominalTerm> args);
Sentence hyb_eq(NominalTerm k, std::string sort, HybridTerm t1, HybridTerm t2);
Sentence rigid_rel(std::string rel, std::vector<HybridTerm> args);
Sentence flex_rel(std::string rel, NominalTerm k, std::vector<HybridTerm> args);
Sentence act_rel(Action a, NominalTerm k1, NominalTerm k2);
Sentence at(NominalTerm k, Sentence g);
Sentence negation(Sentence g);
Sentence conj(std::vector<Sentence> gs);
Sentence truth();
Sentence implies(std::vector<Sentence> hypotheses, Sentence conclusion);
Sentence store(std::string z, Sentence g);
Sentence forall(VariableBlock vars, Sentence g);
Sentence nec(Action a, Sentence g);
Sentence next_op(std::string sigma, Sentence g);
// exists X . g, expressed as not forall X . not g
Sentence exists(VariableBlock vars, Sentence g);

std::size_t depth(const NominalTerm& k);
// Depth of the data structure of a hybrid term; world tags do not count.
std::size_t depth(const HybridTerm& t);

// Canonical term order: depth, then symbol, then tag, then children.
std::strong_ordering canonical_compare(const NominalTerm& a, const NominalTerm& b);
std::strong_ordering canonical_compare(const HybridTerm& a, const HybridTerm& b);

bool is_ground(const NominalTerm& k);
bool is_ground(const HybridTerm& t);

// Variables occurring outside any binder for them.
VariableBlock free_variables(const Sentence& g);
VariableBlock free_variables(const HybridTerm& t);
VariableBlock free_variables(const NominalTerm& k);

}  // namespace hdfol
