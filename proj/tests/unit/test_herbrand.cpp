#include <doctest.h>

#include <algorithm>
#include <set>

#include "generators.hpp"
#include "hdfol/frontend/printer.hpp"
#include "hdfol/herbrand.hpp"
#include "hdfol/initial.hpp"

using namespace hdfol;

namespace {

HybridTerm zero() { return rigid_app("zero"); }
HybridTerm s(HybridTerm t) { return rigid_app("s", {std::move(t)}); }
HybridTerm x() { return data_var("x", "Nat"); }

VariableBlock nat_x() {
  VariableBlock b;
  b.rigid = {{"x", "Nat"}};
  return b;
}

Signature tower_signature() {
  Signature sig;
  sig.nominal_ops = {{"w0", 0}};
  sig.nominal_rels = {{"step", 2}};
  sig.sorts = {{"Nat", true}};
  sig.ops = {{"zero", {}, "Nat", true}, {"s", {"Nat"}, "Nat", true}};
  sig.rels = {{"p", {"Nat"}, true}, {"q", {"Nat"}, true}};
  return sig;
}

std::vector<Sentence> tower_theory() {
  return {rigid_rel("p", {zero()}), forall(nat_x(), implies({rigid_rel("p", {x()})}, rigid_rel("p", {s(x())})))};
}

Signature chain_signature() {
  Signature sig;
  sig.nominal_ops = {{"w0", 0}, {"w1", 0}, {"w2", 0}};
  sig.nominal_rels = {{"step", 2}};
  return sig;
}

std::vector<Sentence> chain_theory() {
  return {nom_rel("step", {nom("w0"), nom("w1")}), nom_rel("step", {nom("w1"), nom("w2")})};
}

Query reach_query() {
  Query q;
  q.vars.nominal = {"z"};
  q.body = {act_rel(star(modality("step")), nom("w0"), nom_var("z"))};
  return q;
}

}  // namespace

TEST_SUITE("herbrand") {

TEST_CASE("solve: a bounded tower") {
  Query q{nat_x(), {rigid_rel("p", {s(x())})}};
  SolveOptions options;
  options.depth = 2;
  const SolveResult r = solve(tower_signature(), tower_theory(), q, options);
  REQUIRE(r.answers.size() == 2);
  CHECK(r.answers[0].substitution.rigid.at("x") == zero());
  CHECK(r.answers[1].substitution.rigid.at("x") == s(zero()));
  CHECK(r.answers[0].depth == 0);
  CHECK(r.answers[1].depth == 1);
  CHECK(r.status == SaturationStatus::BoundExhausted);

  options.limit = 1;
  CHECK(solve(tower_signature(), tower_theory(), q, options).answers.size() == 1);
}

TEST_CASE("solve: reflexive equation answers with the least term") {
  Query q{nat_x(), {hyb_eq(nom("w0"), "Nat", x(), x())}};
  const SolveResult r = solve(tower_signature(), tower_theory(), q);
  REQUIRE_FALSE(r.answers.empty());
  CHECK(r.answers.front().substitution.rigid.at("x") == zero());
}

TEST_CASE("solve: reachability") {
  const SolveResult r = solve(chain_signature(), chain_theory(), reach_query());
  CHECK(r.status == SaturationStatus::Fixpoint);
  std::vector<NominalTerm> got;
  for (const auto& a : r.answers) got.push_back(a.substitution.nominal.at("z"));
  CHECK(got == std::vector<NominalTerm>{nom("w0"), nom("w1"), nom("w2")});
}

TEST_CASE("solve: no answer is only definite at fixpoint") {
  Query q{nat_x(), {rigid_rel("q", {x()})}};
  const Signature sig = tower_signature();
  const SolveResult bounded = solve(sig, tower_theory(), q);
  CHECK(bounded.answers.empty());
  CHECK(bounded.status == SaturationStatus::BoundExhausted);

  std::vector<Sentence> closed = tower_theory();
  closed.push_back(hyb_eq(nom("w0"), "Nat", s(s(zero())), zero()));
  const SolveResult definite = solve(sig, closed, q);
  CHECK(definite.answers.empty());
  CHECK(definite.status == SaturationStatus::Fixpoint);
}

TEST_CASE("solve: canonical and syntactic answers") {
  Signature sig;
  sig.nominal_ops = {{"w0", 0}, {"succ", 1}};
  const std::vector<Sentence> gamma = {nom_eq(nom("succ", {nom("w0")}), nom("w0"))};
  Query q;
  q.vars.nominal = {"z"};
  q.body = {nom_eq(nom_var("z"), nom("w0"))};
  SolveOptions options;
  options.depth = 2;
  const SolveResult canonical = solve(sig, gamma, q, options);
  REQUIRE(canonical.answers.size() == 1);
  CHECK(canonical.answers[0].substitution.nominal.at("z") == nom("w0"));

  options.mode = AnswerMode::AllSyntactic;
  const SolveResult all = solve(sig, gamma, q, options);
  std::vector<NominalTerm> got;
  for (const auto& a : all.answers) got.push_back(a.substitution.nominal.at("z"));
  CHECK(got == std::vector<NominalTerm>{nom("w0"), nom("succ", {nom("w0")}), nom("succ", {nom("succ", {nom("w0")})})});
}

TEST_CASE("solve: a conjunctive body shares its substitution") {
  Signature sig = tower_signature();
  std::vector<Sentence> gamma = {rigid_rel("p", {zero()}), rigid_rel("p", {s(zero())}), rigid_rel("q", {s(zero())}),
                                 hyb_eq(nom("w0"), "Nat", s(s(zero())), zero())};
  Query q{nat_x(), {rigid_rel("p", {x()}), rigid_rel("q", {x()})}};
  const SolveResult r = solve(sig, gamma, q);
  REQUIRE(r.answers.size() == 1);
  CHECK(r.answers[0].substitution.rigid.at("x") == s(zero()));
  CHECK(r.answers[0].witness.size() == 2);
}

TEST_CASE("verify_answer") {
  const Signature sig = tower_signature();
  Query q{nat_x(), {rigid_rel("p", {s(x())})}};
  Substitution theta;
  theta.domain = nat_x();
  theta.rigid["x"] = zero();
  CHECK(verify_answer(sig, tower_theory(), q, theta, 2));
  theta.rigid["x"] = s(s(s(zero())));
  CHECK_FALSE(verify_answer(sig, tower_theory(), q, theta, 2));

  Query empty{nat_x(), {}};
  CHECK(verify_answer(sig, {}, empty, theta, 2));

  Substitution open = theta;
  open.rigid["x"] = data_var("y", "Nat");
  CHECK_THROWS_AS(verify_answer(sig, tower_theory(), q, open, 2), Error);
}

TEST_CASE("validate_query") {
  const Signature sig = tower_signature();
  CHECK(validate_query(sig, Query{nat_x(), {rigid_rel("p", {x()})}}).empty());
  CHECK_FALSE(validate_query(sig, Query{nat_x(), {negation(rigid_rel("p", {x()}))}}).empty());
  CHECK_FALSE(validate_query(sig, Query{{}, {rigid_rel("p", {x()})}}).empty());
}

TEST_CASE("answers are sound, deterministic and stable under reordering") {
  testing::Rng rng(77);
  std::size_t answered = 0;
  for (int i = 0; i < 80; ++i) {
    const auto inst = testing::random_horn_instance(rng);
    const Query q = testing::random_query(inst.signature, rng);
    REQUIRE(validate_query(inst.signature, q).empty());
    SolveOptions options;
    options.depth = 2;
    const SolveResult r = solve(inst.signature, inst.clauses, q, options);
    for (const auto& a : r.answers) {
      INFO(print(q));
      CHECK(verify_answer(inst.signature, inst.clauses, q, a.substitution, 2));
    }
    answered += !r.answers.empty();

    const SolveResult again = solve(inst.signature, inst.clauses, q, options);
    REQUIRE(again.answers.size() == r.answers.size());
    for (std::size_t j = 0; j < r.answers.size(); ++j) CHECK(again.answers[j].substitution == r.answers[j].substitution);

    std::vector<Sentence> shuffled = inst.clauses;
    std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
    const SolveResult permuted = solve(inst.signature, shuffled, q, options);
    std::set<std::string> a, b;
    for (const auto& x : r.answers) a.insert(print(apply_substitution(x.substitution, conj(q.body))));
    for (const auto& x : permuted.answers) b.insert(print(apply_substitution(x.substitution, conj(q.body))));
    CHECK(a == b);
  }
  CHECK(answered > 5);
}

}  // TEST_SUITE
