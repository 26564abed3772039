#include <doctest.h>

#include <algorithm>
#include <set>

#include "generators.hpp"
#include "hdfol/frontend/printer.hpp"
#include "hdfol/initial.hpp"
#include "hdfol/kripke.hpp"
#include "hdfol/wellformed.hpp"
#include "oracles.hpp"

using namespace hdfol;
using testing::running_model;

namespace {

bool mentions(const Diagnostics& diags, const std::string& needle) {
  return std::any_of(diags.begin(), diags.end(),
                     [&](const Diagnostic& d) { return d.message.find(needle) != std::string::npos; });
}

HybridTerm zero() { return rigid_app("zero"); }
HybridTerm s(HybridTerm t) { return rigid_app("s", {std::move(t)}); }

std::set<std::pair<World, World>> pair_set(const WorldRelation& r) {
  auto ps = r.pairs();
  return {ps.begin(), ps.end()};
}

// Three worlds a, b, c with step = {(a, b), (b, c)} and no data.
KripkeModel chain_model() {
  Signature sig;
  sig.nominal_ops = {{"w0", 0}};
  sig.nominal_rels = {{"step", 2}, {"back", 2}};
  KripkeModel m = make_model(sig, {"a", "b", "c"}, {{}, {}, {}});
  m.nominal_ops[0].set(std::vector<std::size_t>{}, 0);
  m.nominal_rels[0].insert(std::vector<std::size_t>{0, 1});
  m.nominal_rels[0].insert(std::vector<std::size_t>{1, 2});
  return m;
}

}  // namespace

TEST_SUITE("kripke") {

TEST_CASE("validate_model") {
  const KripkeModel m = running_model();
  CHECK(validate_model(m.signature, m).empty());
  CHECK(m.locals[0].ops[2] != m.locals[1].ops[2]);  // counter is flexible and differs

  KripkeModel varies = m;
  varies.locals[1].ops[1].set(std::vector<std::size_t>{2}, 0);
  CHECK(mentions(validate_model(varies.signature, varies), "rigid symbol varies"));

  const KripkeModel empty = make_model(m.signature, {}, {});
  CHECK(mentions(validate_model(empty.signature, empty), "empty world set"));

  KripkeModel partial = m;
  partial.nominal_ops[2].values[1] = OpTable::kUndefined;
  CHECK(mentions(validate_model(partial.signature, partial), "partial function"));
}

TEST_CASE("interpret_nominal_term") {
  const KripkeModel m = running_model();
  CHECK(interpret_nominal_term(m, nom("w0")) == 0);
  CHECK(interpret_nominal_term(m, nom("succ", {nom("w0")})) == 1);
  CHECK(interpret_nominal_term(m, nom("succ", {nom("succ", {nom("w0")})})) == 0);
}

TEST_CASE("interpret_hybrid_term") {
  const KripkeModel m = running_model();
  CHECK(interpret_hybrid_term(m, s(zero())) == 1);
  CHECK(interpret_hybrid_term(m, flex_app("counter", nom("w1"))) == 1);
  CHECK(interpret_hybrid_term(m, s(flex_app("counter", nom("w1")))) == 2);
  CHECK(interpret_hybrid_term(m, s(s(s(zero())))) == 2);
  CHECK(m.carrier(1, "Loc")[interpret_hybrid_term(m, flex_app("pos", nom("w1")))] == "away");
}

TEST_CASE("interpret_action") {
  const KripkeModel m = running_model();
  CHECK(pair_set(interpret_action(m, star(modality("step")))) ==
        std::set<std::pair<World, World>>{{0, 0}, {1, 1}, {0, 1}});
  CHECK(pair_set(interpret_action(m, star(alt(modality("step"), modality("back"))))) ==
        std::set<std::pair<World, World>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

  const KripkeModel c = chain_model();
  CHECK(pair_set(interpret_action(c, seq(modality("step"), modality("step")))) ==
        std::set<std::pair<World, World>>{{0, 2}});
  CHECK(pair_set(interpret_action(c, alt(modality("step"), modality("back")))) ==
        std::set<std::pair<World, World>>{{0, 1}, {1, 2}});
}

TEST_CASE("star is the least fixpoint of its unfolding") {
  testing::Rng rng(21);
  Signature sig;
  sig.nominal_ops = {{"w0", 0}};
  sig.nominal_rels = {{"step", 2}, {"back", 2}};
  testing::SyntaxGen gen(sig, rng);
  for (int i = 0; i < 200; ++i) {
    const KripkeModel m = testing::random_model(sig, rng, 5, 1);
    const Action a = gen.action(2);
    const WorldRelation base = interpret_action(m, a);
    // R <- id + R + R;W_a until stable, starting from the empty relation.
    const std::size_t n = m.worlds.size();
    WorldRelation r(n);
    for (bool changed = true; changed;) {
      changed = false;
      WorldRelation next = unite(unite(WorldRelation::identity(n), r), compose(r, base));
      if (next != r) {
        r = next;
        changed = true;
      }
    }
    INFO(print(a));
    CHECK(interpret_action(m, star(a)) == r);
  }
}

TEST_CASE("satisfies") {
  const KripkeModel m = running_model();
  const Sentence g = at(nom("w1"), hyb_eq(nom("w1"), "Nat", flex_app("counter", nom("w1")), s(zero())));
  CHECK(satisfies(m, 0, g));
  for (World w = 0; w < m.worlds.size(); ++w) CHECK(satisfies(m, w, truth()));
  CHECK_FALSE(satisfies(m, 0, store("z", act_rel(modality("step"), nom_var("z"), nom_var("z")))));

  CHECK(satisfies(m, 0, nec(modality("step"), flex_rel("at", nom("w1"), {flex_app("pos", nom("w0"))})) ) == false);
  CHECK(satisfies(m, 1, nec(modality("step"), negation(truth()))));
  CHECK(satisfies(m, 0, next_op("succ", store("z", nom_eq(nom_var("z"), nom("w1"))))));

  VariableBlock x;
  x.rigid = {{"x", "Nat"}};
  CHECK(satisfies(m, 0, exists(x, hyb_eq(nom("w0"), "Nat", s(data_var("x", "Nat")), data_var("x", "Nat")))));
  CHECK_FALSE(satisfies(m, 0, forall(x, rigid_rel("p", {data_var("x", "Nat")}))));
}

TEST_CASE("forall over an empty rigid carrier is vacuous") {
  Signature sig;
  sig.nominal_ops = {{"w0", 0}};
  sig.sorts = {{"Nat", true}};
  sig.rels = {{"p", {"Nat"}, true}};
  KripkeModel m = make_model(sig, {"a"}, {{{}}});
  m.nominal_ops[0].set(std::vector<std::size_t>{}, 0);
  VariableBlock x;
  x.rigid = {{"x", "Nat"}};
  CHECK(validate_model(sig, m).empty());
  CHECK(satisfies(m, 0, forall(x, rigid_rel("p", {data_var("x", "Nat")}))));
  CHECK_FALSE(satisfies(m, 0, exists(x, truth())));
  CHECK(enumerate_expansions(m, x).empty());
}

TEST_CASE("satisfies agrees with explicit expansions") {
  const Signature sig = testing::rich_signature();
  testing::Rng rng(33);
  testing::SyntaxGen gen(sig, rng);
  VariableBlock vars;
  vars.nominal = {"z"};
  vars.rigid = {{"x", "Nat"}};
  for (int i = 0; i < 200; ++i) {
    const KripkeModel m = testing::random_model(sig, rng, 3, 2);
    const Sentence body = gen.sentence(vars, 2);
    const Sentence g = forall(vars, body);
    for (World w = 0; w < m.worlds.size(); ++w) {
      bool all = true;
      for (const auto& e : enumerate_expansions(m, vars)) all = all && satisfies(e, w, body);
      INFO(print(g));
      CHECK(satisfies(m, w, g) == all);
    }
  }
}

TEST_CASE("reduct_along_morphism") {
  const KripkeModel m = running_model();
  CHECK(reduct_along_morphism(SignatureMorphism::identity(m.signature), m) == m);

  VariableBlock z;
  z.nominal = {"z"};
  Assignment to_a;
  to_a.nominal["z"] = 0;
  const KripkeModel expanded = expand(m, z, to_a);
  SignatureMorphism inclusion;
  inclusion.source = m.signature;
  inclusion.target = expanded.signature;
  CHECK(reduct_along_morphism(inclusion, expanded) == m);

  // Target has `move` where the source has `step`.
  SignatureMorphism rename = SignatureMorphism::identity(m.signature);
  rename.nominal_map["step"] = "move";
  rename.target.nominal_rels[0].name = "move";
  KripkeModel target = m;
  target.signature = rename.target;
  target.nominal_rels[0] = RelTable::make({2, 2});
  target.nominal_rels[0].insert(std::vector<std::size_t>{1, 1});
  const KripkeModel reduct = reduct_along_morphism(rename, target);
  CHECK(reduct.signature == m.signature);
  CHECK(pair_set(interpret_action(reduct, modality("step"))) == std::set<std::pair<World, World>>{{1, 1}});
}

TEST_CASE("reduct_along_substitution") {
  const KripkeModel m = running_model();
  VariableBlock x;
  x.rigid = {{"x", "Nat"}};
  Substitution to_zero;
  to_zero.domain = x;
  to_zero.rigid["x"] = zero();
  const KripkeModel rx = reduct_along_substitution(to_zero, m);
  CHECK(interpret_hybrid_term(rx, rigid_app("x")) == 0);

  VariableBlock z;
  z.nominal = {"z"};
  Substitution to_next;
  to_next.domain = z;
  to_next.nominal["z"] = nom("succ", {nom("w0")});
  CHECK(interpret_nominal_term(reduct_along_substitution(to_next, m), nom("z")) == 1);

  Assignment values;
  values.nominal["z"] = 1;
  const KripkeModel mz = expand(m, z, values);
  CHECK(reduct_along_substitution(Substitution::identity(z), mz) == mz);
}

TEST_CASE("enumerate_expansions") {
  const KripkeModel m = running_model();
  CHECK(enumerate_expansions(m, {}).size() == 1);
  CHECK(enumerate_expansions(m, {}).front() == m);
  VariableBlock z;
  z.nominal = {"z"};
  CHECK(enumerate_expansions(m, z).size() == 2);
  VariableBlock zx = z;
  zx.rigid = {{"x", "Nat"}};
  const auto all = enumerate_expansions(m, zx);
  CHECK(all.size() == 6);
  std::set<std::pair<World, Element>> seen;
  for (const auto& e : all) {
    CHECK(validate_model(e.signature, e).empty());
    seen.insert({interpret_nominal_term(e, nom("z")), interpret_hybrid_term(e, rigid_app("x"))});
  }
  CHECK(seen.size() == 6);
}

// The running model is reachable: a = w0, b = w1 and Nat is zero, s(zero), s(s(zero)).
TEST_CASE("expansions of a reachable model come from ground substitutions") {
  const KripkeModel m = running_model();
  const std::vector<NominalTerm> world_terms = {nom("w0"), nom("w1")};
  const std::vector<HybridTerm> nat_terms = {zero(), s(zero()), s(s(zero()))};
  VariableBlock vars;
  vars.nominal = {"z", "z2"};
  vars.rigid = {{"x", "Nat"}};
  for (const auto& e : enumerate_expansions(m, vars)) {
    bool found = false;
    for (const auto& k1 : world_terms) {
      for (const auto& k2 : world_terms) {
        for (const auto& t : nat_terms) {
          Substitution theta;
          theta.domain = vars;
          theta.nominal = {{"z", k1}, {"z2", k2}};
          theta.rigid = {{"x", t}};
          found = found || reduct_along_substitution(theta, m) == e;
        }
      }
    }
    CHECK(found);
  }
}

TEST_CASE("check_homomorphism") {
  const KripkeModel m = running_model();
  CHECK(check_homomorphism(identity_homomorphism(m), m, m).empty());

  KripkeHomomorphism collapse = identity_homomorphism(m);
  collapse.world_map = {0, 0};
  CHECK_FALSE(check_homomorphism(collapse, m, m).empty());

  // Two worlds with identical data and a one-element target: only the rigid maps disagree.
  Signature sig;
  sig.nominal_ops = {{"w0", 0}};
  sig.sorts = {{"Nat", true}};
  const KripkeModel two = make_model(sig, {"a", "b"}, {{{"0", "1"}}, {{"0", "1"}}});
  KripkeModel flat = make_model(sig, {"a", "b"}, {{{"0", "1"}}, {{"0", "1"}}});
  KripkeHomomorphism h = identity_homomorphism(two);
  h.local_maps[1][0] = {1, 0};
  CHECK(mentions(check_homomorphism(h, two, flat), "rigid-sort agreement violated"));
}

TEST_CASE("find_homomorphisms") {
  const KripkeModel m = chain_model();
  const auto self = find_homomorphisms(m, m, 10);
  CHECK(std::find(self.begin(), self.end(), identity_homomorphism(m)) != self.end());
  for (const auto& h : self) CHECK(check_homomorphism(h, m, m).empty());

  KripkeModel missing = m;
  missing.nominal_rels[0] = RelTable::make({3, 3});
  CHECK(find_homomorphisms(m, missing, 2).empty());
}

TEST_CASE("initial model maps uniquely into every small model") {
  Signature sig;
  sig.nominal_ops = {{"w0", 0}, {"succ", 1}};
  sig.nominal_rels = {{"step", 2}};
  sig.sorts = {{"Nat", true}};
  sig.ops = {{"zero", {}, "Nat", true}};
  sig.rels = {{"p", {"Nat"}, true}};
  const NominalTerm w0 = nom("w0");
  const std::vector<Sentence> gamma = {nom_rel("step", {w0, nom("succ", {w0})}),
                                       nom_eq(nom("succ", {nom("succ", {w0})}), w0), rigid_rel("p", {zero()})};
  const auto [initial, r] = build_initial_model(sig, gamma, 3);
  REQUIRE(r.status == SaturationStatus::Fixpoint);
  CHECK(initial.worlds.size() == 2);
  const auto models = testing::models_of(sig, gamma, 2, 2);
  REQUIRE(models.size() > 3);
  for (const auto& target : models) {
    const auto hs = find_homomorphisms(initial, target, 2);
    CHECK(hs.size() == 1);
  }
}

TEST_CASE("atoms are world-independent and preserved by homomorphisms") {
  const Signature sig = testing::rich_signature();
  testing::Rng rng(44);
  testing::SyntaxGen gen(sig, rng);
  for (int i = 0; i < 200; ++i) {
    const KripkeModel m = testing::random_model(sig, rng, 2, 2);
    const Sentence rho = gen.atom({});
    const bool here = satisfies(m, 0, rho);
    for (World w = 1; w < m.worlds.size(); ++w) CHECK(satisfies(m, w, rho) == here);
    const KripkeModel target = testing::random_model(sig, rng, 2, 2);
    for (const auto& h : find_homomorphisms(m, target, 4)) {
      REQUIRE(check_homomorphism(h, m, target).empty());
      if (here) CHECK(satisfies(target, h.world_map[0], rho));
    }
  }
}

}  // TEST_SUITE
