// Acceptance run: one pass/fail line per criterion, nonzero exit on any failure.
// Usage: acceptance <path-to-hdfol-cli> <samples-dir>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "hdfol/frontend/parser.hpp"
#include "hdfol/frontend/printer.hpp"
#include "hdfol/herbrand.hpp"
#include "hdfol/initial.hpp"
#include "hdfol/kripke.hpp"
#include "hdfol/morphism.hpp"
#include "hdfol/substitution.hpp"
#include "hdfol/wellformed.hpp"
#include "oracles.hpp"

using namespace hdfol;
using testing::Rng;
using testing::SyntaxGen;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string first_failure;

  void fail(const std::string& why) {
    if (pass) first_failure = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Tiny signatures whose brute-force model space stays enumerable.
constexpr double kModelCap = 40000;

bool small_enough(const Signature& sig) { return testing::count_models(sig, 2, 2) <= kModelCap; }

bool fits_in_enumeration(const KripkeModel& m) {
  if (m.worlds.size() > 2) return false;
  for (World w = 0; w < m.worlds.size(); ++w) {
    for (const auto& s : m.signature.sorts) {
      const std::size_t n = m.carrier(w, s.name).size();
      if (n == 0 || n > 2) return false;
    }
  }
  return true;
}

std::string clauses_text(const std::vector<Sentence>& gamma) {
  std::string out;
  for (const auto& g : gamma) out += print(g) + "; ";
  return out;
}

// ---- 1: satisfaction condition for substitutions ------------------------------

Outcome substitution_condition() {
  Outcome o;
  Rng rng(1001);
  const Signature sig = testing::rich_signature();
  SyntaxGen gen(sig, rng);
  VariableBlock from;
  from.nominal = {"z"};
  from.rigid = {{"x", "Nat"}, {"x2", "Nat"}};
  VariableBlock open_to;
  open_to.nominal = {"zz"};
  open_to.rigid = {{"w", "Nat"}};
  std::size_t triples = 0, evaluations = 0, held = 0;
  for (int i = 0; i < 1200; ++i) {
    const VariableBlock to = i % 2 == 0 ? VariableBlock{} : open_to;
    const KripkeModel base = testing::random_model(sig, rng, 3, 3);
    Assignment values;
    for (const auto& z : to.nominal) values.nominal[z] = rng.below(base.worlds.size());
    for (const auto& y : to.rigid) values.rigid[y.name] = rng.below(base.carrier(0, y.sort).size());
    const KripkeModel m = expand(base, to, values);
    const Substitution theta = testing::random_substitution(sig, from, to, rng);
    const Sentence g = gen.sentence(from, 4);
    const Sentence translated = apply_substitution(theta, g);
    const KripkeModel reduct = reduct_along_substitution(theta, m);
    ++triples;
    for (World w = 0; w < m.worlds.size(); ++w) {
      const bool lhs = satisfies(m, w, translated);
      const bool rhs = satisfies(reduct, w, g);
      ++evaluations;
      held += lhs;
      if (lhs != rhs) o.fail("disagreement on " + print(g));
    }
  }
  o.detail = std::to_string(triples) + " triples, " + std::to_string(evaluations) + " world checks (" +
             std::to_string(held) + " satisfied)";
  return o;
}

// ---- 2: satisfaction condition for signature morphisms ------------------------

Outcome morphism_condition() {
  Outcome o;
  Rng rng(2002);
  const Signature sig = testing::rich_signature();
  SyntaxGen gen(sig, rng);
  std::size_t triples = 0, evaluations = 0, merged = 0;
  for (int i = 0; i < 1200; ++i) {
    const SignatureMorphism phi = testing::random_renaming(sig, rng);
    if (!validate_morphism(phi).empty()) {
      o.fail("invalid generated morphism");
      continue;
    }
    merged += phi.target.ops.size() < sig.ops.size() || phi.target.nominal_ops.size() < sig.nominal_ops.size();
    const KripkeModel m = testing::random_model(phi.target, rng, 3, 3);
    const Sentence g = gen.sentence({}, 4);
    const Sentence translated = translate_sentence(phi, g);
    const KripkeModel reduct = reduct_along_morphism(phi, m);
    ++triples;
    for (World w = 0; w < m.worlds.size(); ++w) {
      ++evaluations;
      if (satisfies(m, w, translated) != satisfies(reduct, w, g)) o.fail("disagreement on " + print(g));
    }
  }
  o.detail = std::to_string(triples) + " triples, " + std::to_string(evaluations) + " world checks, " +
             std::to_string(merged) + " non-injective morphisms";
  return o;
}

// ---- 3: atoms are world-independent and preserved by homomorphisms ------------

// The target is m with extra tuples; the identity maps are a homomorphism.
KripkeModel enlarge(const KripkeModel& m, Rng& rng) {
  KripkeModel t = m;
  for (auto& r : t.nominal_rels) {
    for (auto& b : r.bits) b = b || rng.chance(0.3);
  }
  for (std::size_t i = 0; i < t.signature.rels.size(); ++i) {
    for (World w = 0; w < t.worlds.size(); ++w) {
      if (t.signature.rels[i].rigid && w > 0) {
        t.locals[w].rels[i] = t.locals[0].rels[i];
        continue;
      }
      for (auto& b : t.locals[w].rels[i].bits) b = b || rng.chance(0.3);
    }
  }
  return t;
}

Outcome fact_one() {
  Outcome o;
  Rng rng(3003);
  const Signature sig = testing::rich_signature();
  SyntaxGen gen(sig, rng);
  std::size_t instances = 0, hom_checks = 0, preserved = 0;
  for (int i = 0; i < 1200; ++i) {
    const KripkeModel m = testing::random_model(sig, rng, 3, 3);
    const Sentence rho = gen.atom({});
    ++instances;
    const bool here = satisfies(m, 0, rho);
    for (World w = 1; w < m.worlds.size(); ++w) {
      if (satisfies(m, w, rho) != here) o.fail("world-dependent atom " + print(rho));
    }

    std::vector<std::pair<KripkeModel, KripkeHomomorphism>> targets;
    targets.push_back({enlarge(m, rng), identity_homomorphism(m)});
    std::vector<GeneratorPair> pairs;
    for (int j = 0; j < 2; ++j) {
      const World w = rng.below(m.worlds.size());
      const std::string sort = rng.chance(0.5) ? "Nat" : "Loc";
      const std::size_t n = m.carrier(w, sort).size();
      pairs.push_back({w, sort, rng.below(n), rng.below(n)});
    }
    targets.push_back(quotient_model(m, generate_congruence(m, pairs)));
    const KripkeModel other = testing::random_model(sig, rng, 2, 2);
    for (auto& h : find_homomorphisms(m, other, 2)) targets.push_back({other, std::move(h)});

    for (const auto& [target, h] : targets) {
      if (!check_homomorphism(h, m, target).empty()) {
        o.fail("constructed map is not a homomorphism");
        continue;
      }
      ++hom_checks;
      for (World w = 0; w < m.worlds.size(); ++w) {
        if (!satisfies(m, w, rho)) continue;
        ++preserved;
        if (!satisfies(target, h.world_map[w], rho)) o.fail("homomorphism does not preserve " + print(rho));
      }
    }
  }
  o.detail = std::to_string(instances) + " instances, " + std::to_string(hom_checks) + " homomorphisms, " +
             std::to_string(preserved) + " preservation checks";
  return o;
}

// ---- 4: necessity and next are definable ---------------------------------------

Outcome derived_laws() {
  Outcome o;
  Rng rng(4004);
  const Signature sig = testing::rich_signature();
  SyntaxGen gen(sig, rng);
  std::size_t pairs = 0, evaluations = 0;
  const std::vector<std::string> unary = {"succ"};
  for (int i = 0; i < 600; ++i) {
    const KripkeModel m = testing::random_model(sig, rng, 3, 2);
    const Sentence g = gen.sentence({}, 3);
    const Action a = gen.action(2);
    // zeta names are outside the generator's binder pool.
    VariableBlock target;
    target.nominal = {"zeta2"};
    const Sentence box = nec(a, g);
    const Sentence box_def = store(
        "zeta", forall(target, implies({act_rel(a, nom_var("zeta"), nom_var("zeta2"))}, at(nom_var("zeta2"), g))));
    const Sentence step = next_op("succ", g);
    const Sentence step_def = store("zeta", at(nom("succ", {nom_var("zeta")}), g));
    ++pairs;
    for (World w = 0; w < m.worlds.size(); ++w) {
      evaluations += 2;
      if (satisfies(m, w, box) != satisfies(m, w, box_def)) o.fail("necessity law fails for " + print(box));
      if (satisfies(m, w, step) != satisfies(m, w, step_def)) o.fail("next law fails for " + print(step));
    }
  }
  o.detail = std::to_string(pairs) + " pairs, " + std::to_string(evaluations) + " world checks";
  return o;
}

// ---- 5 and 7: initiality ------------------------------------------------------

struct InitialityStats {
  std::size_t instances = 0;
  std::size_t fixpoints = 0;
  std::size_t targets = 0;
};

void check_initiality(const testing::TinyInstance& inst, Outcome& o, InitialityStats& stats, bool require_fixpoint) {
  ++stats.instances;
  std::pair<KripkeModel, SaturationResult> built;
  try {
    built = build_initial_model(inst.signature, inst.clauses, 3);
  } catch (const std::exception& e) {
    o.fail(std::string("build failed: ") + e.what() + " on " + clauses_text(inst.clauses));
    return;
  }
  const auto& [initial, r] = built;
  if (r.status != SaturationStatus::Fixpoint) {
    if (require_fixpoint) o.fail("no fixpoint for " + clauses_text(inst.clauses));
    return;
  }
  ++stats.fixpoints;
  for (const auto& g : inst.clauses) {
    if (!satisfies_everywhere(initial, g)) o.fail("initial model violates " + print(g));
  }
  for (const auto& target : testing::models_of(inst.signature, inst.clauses, 2, 2)) {
    ++stats.targets;
    const std::size_t n = find_homomorphisms(initial, target, 2).size();
    if (n != 1) o.fail(std::to_string(n) + " homomorphisms for " + clauses_text(inst.clauses));
  }
}

Outcome atomic_initiality() {
  Outcome o;
  Rng rng(5005);
  InitialityStats stats;
  while (stats.instances < 220) {
    const auto inst = testing::random_atomic_instance(rng);
    if (!small_enough(inst.signature)) continue;
    check_initiality(inst, o, stats, true);
  }
  o.detail = std::to_string(stats.instances) + " theories, " + std::to_string(stats.targets) + " target models";
  return o;
}

Outcome horn_initiality() {
  Outcome o;
  Rng rng(7007);
  InitialityStats stats;
  while (stats.fixpoints < 200) {
    const auto inst = testing::random_horn_instance(rng);
    if (!small_enough(inst.signature)) continue;
    check_initiality(inst, o, stats, false);
  }
  o.detail = std::to_string(stats.instances) + " theories, " + std::to_string(stats.fixpoints) + " at fixpoint, " +
             std::to_string(stats.targets) + " target models";
  return o;
}

// ---- 6: entailment of atoms against brute force --------------------------------

// An instance whose initial model lies inside the enumerated model space, so
// that "true in all models up to size 2" is exact entailment.
struct Decidable {
  testing::TinyInstance inst;
  SaturationResult saturated;
  KripkeModel initial;
  std::vector<KripkeModel> models;
};

bool make_decidable(const testing::TinyInstance& inst, Decidable& out) {
  if (!small_enough(inst.signature)) return false;
  try {
    auto [initial, r] = build_initial_model(inst.signature, inst.clauses, 3);
    if (r.status != SaturationStatus::Fixpoint || !fits_in_enumeration(initial)) return false;
    out.inst = inst;
    out.saturated = std::move(r);
    out.initial = std::move(initial);
    out.models = testing::models_of(inst.signature, inst.clauses, 2, 2);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

Outcome atom_entailment() {
  Outcome o;
  Rng rng(6006);
  std::size_t atoms = 0, entailed = 0, theories = 0;
  while (atoms < 240) {
    const auto inst = rng.chance(0.5) ? testing::random_atomic_instance(rng) : testing::random_horn_instance(rng);
    Decidable d;
    if (!make_decidable(inst, d)) continue;
    ++theories;
    for (int j = 0; j < 4; ++j) {
      const Sentence rho = testing::random_ground_atom(inst.signature, rng);
      const bool fast = entails_atom(d.saturated, rho);
      const bool brute = testing::holds_in_all(d.models, rho);
      ++atoms;
      entailed += brute;
      if (fast != brute) o.fail("entails_atom disagrees on " + print(rho) + " under " + clauses_text(inst.clauses));
    }
  }
  o.detail = std::to_string(atoms) + " atoms over " + std::to_string(theories) + " theories (" + std::to_string(entailed) +
             " entailed)";
  return o;
}

// ---- 8: query answering, three ways ---------------------------------------------

Sentence query_sentence(const Query& q) {
  Sentence body = q.body.size() == 1 ? q.body.front() : conj(q.body);
  return q.vars.empty() ? body : exists(q.vars, body);
}

Outcome herbrand_agreement() {
  Outcome o;
  Rng rng(8008);
  std::size_t instances = 0, positive = 0;
  while (instances < 150) {
    const auto inst = rng.chance(0.3) ? testing::random_atomic_instance(rng) : testing::random_horn_instance(rng);
    Decidable d;
    if (!make_decidable(inst, d)) continue;
    const Query q = testing::random_query(inst.signature, rng);
    ++instances;
    const SolveResult solved = solve(d.saturated, q, 1);
    const Sentence existential = query_sentence(q);
    const bool by_solver = !solved.answers.empty();
    const bool by_initial = satisfies(d.initial, 0, existential);
    const bool by_models = testing::holds_in_all(d.models, existential);
    positive += by_models;
    if (by_solver != by_initial || by_initial != by_models) {
      o.fail("solver " + std::to_string(by_solver) + ", initial " + std::to_string(by_initial) + ", models " +
             std::to_string(by_models) + " for " + print(q) + " under " + clauses_text(inst.clauses));
    }
  }
  o.detail = std::to_string(instances) + " queries (" + std::to_string(positive) + " entailed)";
  return o;
}

// ---- 9: star against Floyd-Warshall --------------------------------------------

Outcome star_closure() {
  Outcome o;
  Rng rng(9009);
  Signature sig;
  sig.nominal_ops = {{"w0", 0}};
  sig.nominal_rels = {{"step", 2}, {"back", 2}};
  SyntaxGen gen(sig, rng);
  std::size_t relations = 0;
  for (int i = 0; i < 600; ++i) {
    const KripkeModel m = testing::random_model(sig, rng, 6, 1);
    const Action a = i % 2 == 0 ? modality("step") : gen.action(2);
    const WorldRelation base = interpret_action(m, a);
    const std::size_t n = m.worlds.size();
    testing::BoolMatrix matrix(n, std::vector<bool>(n, false));
    for (World x = 0; x < n; ++x) {
      for (World y = 0; y < n; ++y) matrix[x][y] = base.contains(x, y);
    }
    const auto expected = testing::floyd_warshall_star(matrix);
    const WorldRelation got = interpret_action(m, star(a));
    ++relations;
    for (World x = 0; x < n; ++x) {
      for (World y = 0; y < n; ++y) {
        if (got.contains(x, y) != expected[x][y]) o.fail("closure differs for " + print(a));
      }
    }
  }
  o.detail = std::to_string(relations) + " relations over up to 6 worlds";
  return o;
}

// ---- 10: determinism and round trips ---------------------------------------------

std::string run_command(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return out + "\n<exit " + std::to_string(status) + ">";
}

Outcome determinism(const std::string& cli, const std::string& samples) {
  Outcome o;
  Rng rng(10010);

  std::size_t shuffles = 0;
  while (shuffles < 120) {
    const auto inst = testing::random_horn_instance(rng);
    if (inst.clauses.size() < 2) continue;
    const auto base = saturate(inst.signature, inst.clauses, 2);
    const std::set<std::string> atoms = [&] {
      std::set<std::string> s;
      for (const auto& a : base.atom_base) s.insert(print(a));
      return s;
    }();
    for (int j = 0; j < 3; ++j) {
      std::vector<Sentence> permuted = inst.clauses;
      std::shuffle(permuted.begin(), permuted.end(), rng.engine());
      const auto again = saturate(inst.signature, permuted, 2);
      std::set<std::string> s;
      for (const auto& a : again.atom_base) s.insert(print(a));
      ++shuffles;
      if (s != atoms || again.status != base.status || again.model != base.model) {
        o.fail("saturation depends on clause order for " + clauses_text(inst.clauses));
      }
    }
  }

  std::size_t trees = 0;
  const Signature sig = testing::rich_signature();
  SyntaxGen gen(sig, rng);
  for (int i = 0; i < 1000; ++i) {
    const Sentence g = gen.sentence({}, 4);
    const auto back = parse_sentence(print(g), sig);
    ++trees;
    if (!back.ok() || back.value() != g) o.fail("sentence does not round-trip: " + print(g));
    const Action a = gen.action(3);
    const auto parsed = parse_action(print(a), sig);
    ++trees;
    if (!parsed.ok() || parsed.value() != a) o.fail("action does not round-trip: " + print(a));
  }
  for (int i = 0; i < 100; ++i) {
    const auto inst = testing::random_horn_instance(rng);
    const Theory t{inst.signature, inst.clauses};
    const auto back = parse_theory(print(t));
    ++trees;
    if (!back.ok() || back.value() != t) o.fail("theory does not round-trip: " + clauses_text(inst.clauses));
    const KripkeModel m = testing::random_model(sig, rng, 3, 3);
    const auto model = parse_model_file(print(m));
    ++trees;
    if (!model.ok() || model.value() != m) o.fail("model does not round-trip");
  }

  const std::string base = "'" + cli + "' --format machine ";
  const std::string dir = "'" + samples + "/";
  const std::vector<std::string> commands = {
      base + "check --model " + dir + "running.hdm' --sentence '@ w1 . counter = s(zero)'",
      base + "check --model " + dir + "running.hdm' --sentence 'step(w1, w0)'",
      base + "init --theory " + dir + "cycle.hdt'",
      base + "init --theory " + dir + "tower.hdt' --depth 2",
      base + "init --theory " + dir + "empty.hdt'",
      base + "init --theory " + dir + "boxed.hdt' --depth 2",
      base + "solve --theory " + dir + "tower.hdt' --query 'exists x:Nat . p(s(x))' --depth 2",
      base + "solve --theory " + dir + "reach.hdt' --query 'exists z:world . step*(w0, z)'",
      base + "solve --theory " + dir + "facts.hdt' --query 'exists x:Nat . q(x)'",
  };
  std::size_t runs = 0;
  for (const auto& cmd : commands) {
    const std::string first = run_command(cmd + " 2>&1");
    if (first.find("{\"") == std::string::npos) o.fail("no machine output from: " + cmd);
    for (int j = 0; j < 2; ++j) {
      if (run_command(cmd + " 2>&1") != first) o.fail("output differs between runs: " + cmd);
    }
    runs += 3;
  }
  o.detail = std::to_string(shuffles) + " shuffles, " + std::to_string(trees) + " round trips, " + std::to_string(runs) +
             " CLI runs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <hdfol-cli> <samples-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::string samples = argv[2];

  struct Criterion {
    int number;
    std::string name;
    double budget_seconds;  // 0 means no time bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "satisfaction condition for substitutions", 60, substitution_condition},
      {2, "satisfaction condition for signature morphisms", 60, morphism_condition},
      {3, "atoms: world independence and homomorphism preservation", 0, fact_one},
      {4, "necessity and next laws", 0, derived_laws},
      {5, "atomic initiality", 300, atomic_initiality},
      {6, "entails_atom against brute-force entailment", 0, atom_entailment},
      {7, "Horn-clause initiality at fixpoint", 0, horn_initiality},
      {8, "solver, initial model and brute force agree", 0, herbrand_agreement},
      {9, "star against Floyd-Warshall closure", 0, star_closure},
      {10, "determinism and round trips", 0, [&] { return determinism(cli, samples); }},
  };

  bool all = true;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(start);
    if (c.budget_seconds > 0 && secs > c.budget_seconds) o.fail("over the time budget");
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << "criterion " << c.number << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << o.detail
         << "; " << secs << " s]";
    if (!o.pass) line << "  first failure: " << o.first_failure;
    std::cout << line.str() << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
