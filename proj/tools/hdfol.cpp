#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdfol/frontend/parser.hpp"
#include "hdfol/frontend/printer.hpp"
#include "hdfol/herbrand.hpp"
#include "hdfol/initial.hpp"
#include "hdfol/kripke.hpp"

namespace {

using hdfol::Error;
using Json = nlohmann::ordered_json;

enum Exit { kYes = 0, kNo = 1, kInputError = 2, kInconclusive = 3 };

struct Style {
  bool color = false;

  std::string good(const std::string& s) const { return color ? "\033[32m" + s + "\033[0m" : s; }
  std::string bad(const std::string& s) const { return color ? "\033[31m" + s + "\033[0m" : s; }
  std::string dim(const std::string& s) const { return color ? "\033[2m" + s + "\033[0m" : s; }
};

struct Config {
  bool machine = false;
  Style style;
};

// Error carrying the file the diagnostics refer to.
struct InputError {
  std::string origin;
  hdfol::Diagnostics diags;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{path, {{"cannot read file", {}}}};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T unwrap(hdfol::Result<T> r, const std::string& origin) {
  if (!r.ok()) throw InputError{origin, r.diagnostics()};
  return std::move(r).value();
}

std::string status_line(hdfol::SaturationStatus status, std::size_t depth) {
  if (status == hdfol::SaturationStatus::Fixpoint) return "status: fixpoint";
  return "status: bound_exhausted(depth=" + std::to_string(depth) + ")";
}

std::string status_name(hdfol::SaturationStatus status) {
  return status == hdfol::SaturationStatus::Fixpoint ? "fixpoint" : "bound_exhausted";
}

int cmd_check(const Config& cfg, const std::string& model_path, const std::string& text,
              const std::optional<std::string>& world) {
  const hdfol::KripkeModel m = unwrap(hdfol::parse_model_file(read_file(model_path)), model_path);
  const hdfol::Sentence g = unwrap(hdfol::parse_sentence(text, m.signature), "<sentence>");
  std::vector<hdfol::World> targets;
  if (world) {
    auto w = m.find_world(*world);
    if (!w) throw InputError{model_path, {{"unknown world '" + *world + "'", {}}}};
    targets.push_back(*w);
  } else {
    for (hdfol::World w = 0; w < m.worlds.size(); ++w) targets.push_back(w);
  }
  bool all = true;
  for (hdfol::World w : targets) {
    const bool ok = hdfol::satisfies(m, w, g);
    all = all && ok;
    if (cfg.machine) {
      Json rec;
      rec["world"] = m.worlds[w];
      rec["satisfied"] = ok;
      std::cout << rec.dump() << "\n";
    } else {
      std::cout << hdfol::print_name(m.worlds[w]) << ": " << (ok ? cfg.style.good("satisfied") : cfg.style.bad("not satisfied"))
                << "\n";
    }
  }
  return all ? kYes : kNo;
}

int cmd_init(const Config& cfg, const std::string& theory_path, std::size_t depth, std::size_t rounds,
             const std::optional<std::string>& output) {
  const hdfol::Theory theory = unwrap(hdfol::parse_theory(read_file(theory_path)), theory_path);
  hdfol::SaturationOptions options;
  options.round_limit = rounds;
  const auto [initial, r] = hdfol::build_initial_model(theory.signature, theory.clauses, depth, options);
  const std::string model = hdfol::print(initial);
  if (output) {
    std::ofstream out(*output, std::ios::binary);
    if (!out || !(out << model)) throw InputError{*output, {{"cannot write file", {}}}};
  }
  if (cfg.machine) {
    if (!output) {
      Json rec;
      rec["model"] = model;
      std::cout << rec.dump() << "\n";
    }
    Json st;
    st["status"] = status_name(r.status);
    st["rounds"] = r.rounds;
    std::cout << st.dump() << "\n";
  } else {
    if (!output) std::cout << model;
    const std::string line = status_line(r.status, depth);
    std::cout << (r.status == hdfol::SaturationStatus::Fixpoint ? cfg.style.good(line) : cfg.style.bad(line)) << "\n";
  }
  return r.status == hdfol::SaturationStatus::Fixpoint ? kYes : kInconclusive;
}

int cmd_solve(const Config& cfg, const std::string& theory_path, const std::string& text, std::size_t depth,
              std::size_t limit, std::size_t rounds, hdfol::AnswerMode mode) {
  const hdfol::Theory theory = unwrap(hdfol::parse_theory(read_file(theory_path)), theory_path);
  const hdfol::Query q = unwrap(hdfol::parse_query(text, theory.signature), "<query>");
  hdfol::SolveOptions options;
  options.depth = depth;
  options.limit = limit;
  options.mode = mode;
  options.saturation.round_limit = rounds;
  const hdfol::SolveResult r = hdfol::solve(theory.signature, theory.clauses, q, options);

  auto value_of = [&](const hdfol::Substitution& theta, const std::string& var) -> std::string {
    if (auto it = theta.nominal.find(var); it != theta.nominal.end()) return hdfol::print(it->second);
    return hdfol::print(theta.rigid.at(var), std::nullopt);
  };
  std::vector<std::string> names = q.vars.nominal;
  for (const auto& x : q.vars.rigid) names.push_back(x.name);

  for (std::size_t i = 0; i < r.answers.size(); ++i) {
    const hdfol::Answer& a = r.answers[i];
    if (cfg.machine) {
      Json rec;
      rec["answer"] = Json::object();
      for (const auto& n : names) rec["answer"][n] = value_of(a.substitution, n);
      rec["depth"] = a.depth;
      std::cout << rec.dump() << "\n";
    } else {
      if (i > 0) std::cout << "\n";
      if (names.empty()) std::cout << cfg.style.good("yes") << "\n";
      for (const auto& n : names) std::cout << n << " = " << value_of(a.substitution, n) << "\n";
    }
  }
  if (cfg.machine) {
    Json st;
    st["status"] = status_name(r.status);
    st["rounds"] = r.rounds;
    std::cout << st.dump() << "\n";
  } else {
    if (r.answers.empty()) std::cout << cfg.style.bad("no answers") << "\n";
    std::cout << cfg.style.dim(status_line(r.status, depth)) << "\n";
  }
  if (!r.answers.empty()) return kYes;
  return r.status == hdfol::SaturationStatus::Fixpoint ? kNo : kInconclusive;
}

int cmd_print(const std::string& path) {
  const std::string text = read_file(path);
  if (hdfol::looks_like_model_file(text)) {
    std::cout << hdfol::print(unwrap(hdfol::parse_model_file(text), path));
  } else {
    std::cout << hdfol::print(unwrap(hdfol::parse_theory(text), path));
  }
  return kYes;
}

void report(const std::string& origin, const hdfol::Diagnostics& diags) {
  for (const auto& d : diags) std::cerr << hdfol::format_diagnostic(d, origin) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hdfol: model checking, initial models and query answering for hybrid-dynamic Horn theories"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "human";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"human", "machine"}));

  std::string model_path, sentence, theory_path, query, answers = "canonical", print_path;
  std::optional<std::string> world, output;
  std::size_t depth = 3, rounds = 1000, limit = std::numeric_limits<std::size_t>::max();

  auto* check = app.add_subcommand("check", "Evaluate a sentence in an explicit model");
  check->add_option("--model", model_path, "Model file (.hdm)")->required();
  check->add_option("--sentence", sentence, "Sentence text")->required();
  check->add_option("--world", world, "Evaluate only at this world");

  auto* init = app.add_subcommand("init", "Build the initial model of a Horn theory");
  init->add_option("--theory", theory_path, "Theory file (.hdt)")->required();
  init->add_option("--depth", depth, "Term depth bound")->check(CLI::NonNegativeNumber);
  init->add_option("--rounds", rounds, "Saturation round limit")->check(CLI::PositiveNumber);
  init->add_option("--output", output, "Write the model to this file");

  auto* solve = app.add_subcommand("solve", "Answer an existential query");
  solve->add_option("--theory", theory_path, "Theory file (.hdt)")->required();
  solve->add_option("--query", query, "Query text")->required();
  solve->add_option("--depth", depth, "Term depth bound")->check(CLI::NonNegativeNumber);
  solve->add_option("--limit", limit, "Maximum number of answers")->check(CLI::PositiveNumber);
  solve->add_option("--rounds", rounds, "Saturation round limit")->check(CLI::PositiveNumber);
  solve->add_option("--answers", answers, "Answer reporting mode")
      ->check(CLI::IsMember({"canonical", "all-syntactic"}));

  auto* print = app.add_subcommand("print", "Parse a theory or model file and print it canonically");
  print->add_option("file", print_path, "Theory or model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  Config cfg;
  cfg.machine = format == "machine";
  if (const char* c = std::getenv("HDFOL_COLOR")) cfg.style.color = std::string(c) == "1" && !cfg.machine;

  try {
    if (*check) return cmd_check(cfg, model_path, sentence, world);
    if (*init) return cmd_init(cfg, theory_path, depth, rounds, output);
    if (*solve) {
      const auto mode = answers == "canonical" ? hdfol::AnswerMode::Canonical : hdfol::AnswerMode::AllSyntactic;
      return cmd_solve(cfg, theory_path, query, depth, limit, rounds, mode);
    }
    return cmd_print(print_path);
  } catch (const InputError& e) {
    report(e.origin, e.diags);
  } catch (const Error& e) {
    report("", e.diagnostics());
  }
  return kInputError;
}
