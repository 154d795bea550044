// Command-line front end.  Subcommands: design (build a payment scheme for a
// world), verify (audit a scheme game-theoretically), experiment (seeded CSV
// tables), generate (seeded random worlds).  Exit 0 on success, 1 on domain
// errors with a one-line JSON object on stderr, 2 on usage errors.

#include <peerpay/beliefs.hpp>
#include <peerpay/designers.hpp>
#include <peerpay/errors.hpp>
#include <peerpay/harness.hpp>
#include <peerpay/mechanism.hpp>
#include <peerpay/rational.hpp>
#include <peerpay/rng.hpp>
#include <peerpay/verifier.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace peerpay;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInput("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw MalformedInput("cannot write " + path);
}

json profile_json(const ProfileCounts& p) {
  return json{{"name", profile_name(p)},
              {"all_neg", p.n_neg},
              {"all_pos", p.n_pos},
              {"honest", p.n_honest},
              {"lie", p.n_lie}};
}

json values_json(const std::vector<GroupValue>& values) {
  json out = json::object();
  for (const auto& v : values) {
    out[strategy_name(v.strategy)] = format_exact(v.value);
  }
  return out;
}

json equilibrium_json(const EquilibriumReport& r) {
  json out{{"profile", profile_json(r.profile)},
           {"is_ne", r.is_ne},
           {"is_strict_ne", r.is_strict_ne},
           {"margin", format_exact(r.margin)},
           {"values", values_json(r.values)}};
  if (r.witness) {
    out["witness"] = json{{"strategy", strategy_name(r.witness->strategy)},
                          {"observation", r.witness->observation},
                          {"better_report", r.witness->better_report},
                          {"gain", format_exact(r.witness->gain)}};
  }
  return out;
}

json exact_list(const std::vector<Rat>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(format_exact(v));
  return out;
}

struct DesignArgs {
  std::string scenario;
  std::string world_path;
  int n_agents = 0;
  int n_col = 1;
  std::string mode = "unique";
  std::string lambda;
  std::string epsilon;
  std::string delta = "0";
  std::string objective = "per-report";
  std::string rule;
  bool full_table = false;
  std::uint64_t guard = 1000000;
  std::string output;
};

void run_design(const DesignArgs& a, bool ncol_given) {
  if (!a.rule.empty() && a.scenario != "sybil") {
    throw CLI::ValidationError("--rule is only valid with --scenario sybil");
  }
  if (!a.rule.empty() && ncol_given) {
    throw CLI::ValidationError(
        "--rule builds the fully sybil-proof table; --ncol does not apply");
  }
  const World w = world_from_json(read_file(a.world_path));
  const Rat margin = parse_rational(a.lambda);
  if (!a.rule.empty()) {
    const auto rule = a.rule == "log" ? ScoringRule::logarithmic
                                      : ScoringRule::quadratic;
    write_output(a.output,
                 scheme_to_json(closed_form_sybil(w, a.n_agents, margin, rule)));
    return;
  }
  DesignRequest req;
  req.world = w;
  req.n_agents = a.n_agents;
  req.scenario = scenario_from_name(a.scenario);
  req.n_col = a.n_col;
  req.mode = a.mode == "pareto" ? CollusionMode::pareto : CollusionMode::unique;
  req.margin = margin;
  if (!a.epsilon.empty()) req.epsilon = parse_rational(a.epsilon);
  req.delta = parse_rational(a.delta);
  req.objective = a.objective == "total-budget" ? Objective::total_budget
                                                : Objective::per_report;
  req.full_table = a.full_table;
  req.guard = a.guard;
  write_output(a.output, scheme_to_json(design(req)));
}

struct VerifyArgs {
  std::string world_path;
  std::string scheme_path;
  bool enumerate = false;
  bool strict = false;
  std::vector<int> dominant;
  std::vector<int> coalition;
  std::string output;
};

void run_verify(const VerifyArgs& a) {
  const World w = world_from_json(read_file(a.world_path));
  const PaymentScheme s = scheme_from_json(read_file(a.scheme_path));
  validate_world(w);
  validate_scheme(s);
  const int n = s.n_agents;
  const std::string digest = world_digest(w);

  json report;
  report["world"] = json{{"digest", digest},
                         {"types", w.num_types()},
                         {"n_agents", n}};
  json scheme_info = json::object();
  if (!s.scenario.empty()) scheme_info["scenario"] = s.scenario;
  if (!s.world.empty()) {
    scheme_info["designed_for"] = s.world;
    scheme_info["matches_world"] = s.world == digest;
  }
  if (s.lambda) scheme_info["lambda"] = format_exact(*s.lambda);
  if (s.epsilon) scheme_info["epsilon"] = format_exact(*s.epsilon);
  report["scheme"] = scheme_info;

  const ProfileCounts honest{0, 0, n, 0};
  report["honest"] = equilibrium_json(analyze_profile(s, w, honest));

  if (a.enumerate) {
    json list = json::array();
    for (const auto& eq : enumerate_pure_equilibria(s, w, a.strict)) {
      list.push_back(equilibrium_json(eq));
    }
    report["equilibria"] = list;
  }

  json pareto = json::array();
  const std::pair<const char*, ProfileCounts> rivals[] = {
      {"all_neg", ProfileCounts{n, 0, 0, 0}},
      {"all_pos", ProfileCounts{0, n, 0, 0}},
      {"lie", ProfileCounts{0, 0, 0, n}},
  };
  for (const auto& [name, rival] : rivals) {
    const auto cmp = pareto_compare(s, w, honest, rival);
    pareto.push_back(json{{"against", name},
                          {"honest_values", exact_list(cmp.a_values)},
                          {"rival_values", exact_list(cmp.b_values)},
                          {"honest_dominates", cmp.a_dominates},
                          {"rival_dominates", cmp.b_dominates},
                          {"honest_weakly_dominates", cmp.a_weakly_dominates},
                          {"rival_weakly_dominates", cmp.b_weakly_dominates}});
  }
  report["pareto"] = pareto;

  json dominance = json::array();
  for (int k : a.dominant) {
    const auto d = is_dominant_honest(s, w, k);
    json entry{{"n_col", k}, {"ok", d.ok}, {"min_gap", format_exact(d.min_gap)}};
    if (d.witness) {
      entry["witness"] = json{{"coalition_high", d.witness->coalition_high},
                              {"observation", d.witness->observation},
                              {"gap", format_exact(d.witness->gap)}};
    }
    dominance.push_back(entry);
  }
  report["dominance"] = dominance;

  json coalitions = json::array();
  for (int k : a.coalition) {
    json rows = json::array();
    for (int c = 0; c <= k; ++c) {
      const auto best = coalition_best_report(s, w, k, c);
      rows.push_back(json{{"observed_high", c},
                          {"best_report", best.report},
                          {"strict", best.strict}});
    }
    coalitions.push_back(json{{"n_col", k}, {"reports", rows}});
  }
  report["coalition_best"] = coalitions;

  write_output(a.output, report.dump(2) + "\n");
}

struct ExperimentArgs {
  std::uint64_t seed = 0;
  int samples = 200;
  std::vector<int> agents = {5, 10};
  std::string margin = "1";
  int precision = 6;
  std::string scenario = "dominant";
  std::string output;
};

ExperimentConfig to_config(const ExperimentArgs& a) {
  ExperimentConfig cfg;
  cfg.seed = a.seed;
  cfg.samples = a.samples;
  cfg.agent_counts = a.agents;
  cfg.margin = parse_rational(a.margin);
  cfg.precision = a.precision;
  return cfg;
}

struct GenerateArgs {
  std::uint64_t seed = 0;
  int count = 1;
  std::string output;
};

void run_generate(const GenerateArgs& a) {
  if (a.count < 1) throw MalformedInput("count must be at least 1");
  if (a.count == 1) {
    auto rng = substream(a.seed, 0);
    write_output(a.output, world_to_json(generate_problem(rng)));
    return;
  }
  // Problem index i matches the harness: world i of `experiment --seed S` is
  // world i of `generate --seed S --count >i`.
  json worlds = json::array();
  for (int i = 0; i < a.count; ++i) {
    auto rng = substream(a.seed, i);
    worlds.push_back(json::parse(world_to_json(generate_problem(rng))));
  }
  write_output(a.output, worlds.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Minimum-cost collusion-resistant peer-prediction payments: "
      "design schemes, audit their equilibria, run seeded experiments."};
  app.require_subcommand(1);

  const std::vector<std::string> scenario_names = {
      "optimal-ic",      "unique-symmetric",       "pareto-symmetric",
      "full-asymmetric-pareto", "partial-symmetric", "partial-asymmetric",
      "dominant",        "sybil"};

  DesignArgs da;
  auto* design_cmd =
      app.add_subcommand("design", "Solve for a payment scheme");
  design_cmd->add_option("--scenario", da.scenario, "Guarantee to enforce")
      ->required()
      ->check(CLI::IsMember(scenario_names));
  design_cmd->add_option("--world", da.world_path, "World JSON file")
      ->required();
  design_cmd->add_option("--n", da.n_agents, "Number of agents")->required();
  auto* ncol_opt = design_cmd->add_option(
      "--ncol", da.n_col, "Coalition size for coalition scenarios");
  design_cmd->add_option("--mode", da.mode, "Collusion-resistance flavor")
      ->check(CLI::IsMember({"unique", "pareto"}));
  design_cmd
      ->add_option("--lambda", da.lambda,
                   "Required truth-telling margin (decimal or fraction)")
      ->required();
  design_cmd->add_option("--epsilon", da.epsilon,
                         "Small-payment gap, default lambda/1000");
  design_cmd->add_option("--delta", da.delta,
                         "Closure gap for destabilization rows");
  design_cmd->add_option("--objective", da.objective, "Cost to minimize")
      ->check(CLI::IsMember({"per-report", "total-budget"}));
  design_cmd->add_option(
      "--rule", da.rule,
      "Scoring-rule sybil construction (sybil scenario only)")
      ->check(CLI::IsMember({"quadratic", "log"}));
  design_cmd->add_flag("--full-table", da.full_table,
                       "Destabilize every profile, not just the sparse family");
  design_cmd->add_option("--guard", da.guard,
                         "Cap on enumerated destabilization selections");
  design_cmd->add_option("-o,--output", da.output,
                         "Scheme JSON path, default stdout");
  design_cmd->callback(
      [&] { run_design(da, ncol_opt->count() > 0); });

  VerifyArgs va;
  auto* verify_cmd =
      app.add_subcommand("verify", "Audit a scheme against a world");
  verify_cmd->add_option("--world", va.world_path, "World JSON file")
      ->required();
  verify_cmd->add_option("--scheme", va.scheme_path, "Scheme JSON file")
      ->required();
  verify_cmd->add_flag("--enumerate", va.enumerate,
                       "List every pure strategy-count equilibrium");
  verify_cmd->add_flag("--strict", va.strict,
                       "Filter the enumeration by the strict reading");
  verify_cmd->add_option("--dominant", va.dominant,
                         "Check honesty dominant against this coalition size");
  verify_cmd->add_option("--coalition", va.coalition,
                         "Tabulate best block reports for this coalition size");
  verify_cmd->add_option("-o,--output", va.output,
                         "Report JSON path, default stdout");
  verify_cmd->callback([&] { run_verify(va); });

  ExperimentArgs ea;
  auto* exp_cmd = app.add_subcommand("experiment", "Seeded CSV experiments");
  exp_cmd->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", ea.seed, "Generator seed")->required();
    cmd->add_option("--samples", ea.samples, "Problems per table");
    cmd->add_option("--agents", ea.agents, "Population sizes")
        ->delimiter(',');
    cmd->add_option("--margin", ea.margin, "Truth-telling margin");
    cmd->add_option("--precision", ea.precision,
                    "Significant digits in decimal cells");
    cmd->add_option("-o,--output", ea.output, "CSV path, default stdout");
  };
  auto* curve_cmd = exp_cmd->add_subcommand(
      "cost-curve", "Normalized cost as the coalition grows");
  add_common(curve_cmd);
  curve_cmd->add_option("--scenario", ea.scenario, "Coalition model")
      ->check(CLI::IsMember({"dominant", "sybil"}));
  curve_cmd->callback([&] {
    write_output(ea.output,
                 run_cost_curve(to_config(ea), scenario_from_name(ea.scenario)));
  });
  auto* bound_cmd = exp_cmd->add_subcommand(
      "coalition-bound", "Distribution of the largest protected coalition");
  add_common(bound_cmd);
  bound_cmd->callback(
      [&] { write_output(ea.output, run_coalition_bound(to_config(ea))); });
  auto* compare_cmd = exp_cmd->add_subcommand(
      "concept-compare", "Pareto vs unique vs dominant cost per instance");
  add_common(compare_cmd);
  compare_cmd->callback(
      [&] { write_output(ea.output, run_concept_comparison(to_config(ea))); });

  GenerateArgs ga;
  auto* gen_cmd =
      app.add_subcommand("generate", "Emit seeded random worlds as JSON");
  gen_cmd->add_option("--seed", ga.seed, "Generator seed")->required();
  gen_cmd->add_option("--count", ga.count,
                      "How many worlds (one object, or an array if more)");
  gen_cmd->add_option("-o,--output", ga.output, "Output path, default stdout");
  gen_cmd->callback([&] { run_generate(ga); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const peerpay::Error& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Unhandled"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  return 0;
}
