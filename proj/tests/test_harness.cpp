#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <peerpay/designers.hpp>
#include <peerpay/errors.hpp>
#include <peerpay/harness.hpp>
#include <peerpay/mechanism.hpp>

#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace peerpay;
using peerpay::testing::make_plumber;

namespace {

std::vector<std::string> data_rows(const std::string& table) {
  std::vector<std::string> rows;
  std::istringstream in(table);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream in(row);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

ExperimentConfig tiny(std::uint64_t seed, int samples,
                      std::vector<int> counts) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.samples = samples;
  cfg.agent_counts = std::move(counts);
  return cfg;
}

}  // namespace

TEST_CASE("generator matches the published output sequence") {
  SplitMix64 g(1);
  CHECK(g.next() == 10451216379200822465ULL);
  CHECK(g.next() == 13757245211066428519ULL);
  CHECK(g.next() == 17911839290282890590ULL);

  auto a = substream(42, 7);
  auto b = substream(42, 7);
  CHECK(a.next() == b.next());
  auto c = substream(42, 8);
  auto d = substream(43, 7);
  SplitMix64 fresh = substream(42, 7);
  const std::uint64_t base = fresh.next();
  CHECK(c.next() != base);
  CHECK(d.next() != base);
}

TEST_CASE("uniform draws stay in range and cover it") {
  SplitMix64 g(2024);
  std::set<int> seen;
  for (int i = 0; i < 500; ++i) {
    const int v = g.uniform(3, 7);
    CHECK(v >= 3);
    CHECK(v <= 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
  CHECK(g.uniform(9, 9) == 9);
}

TEST_CASE("seeded problems are reproducible") {
  auto rng = substream(42, 0);
  const World w = generate_problem(rng);
  auto rng_again = substream(42, 0);
  const World again = generate_problem(rng_again);
  CHECK(world_to_json(w) == world_to_json(again));

  CHECK(w.num_types() == 15);
  CHECK(w.prior[0] == Rat(7757, 73461));
  CHECK(w.high_prob[0] == Rat(241, 2000));
  CHECK(world_digest(w) == "7d8e5cfbb65f8397");

  auto other = substream(42, 1);
  CHECK(world_digest(generate_problem(other)) == "18dfa6e98027ec1c");
}

TEST_CASE("generated worlds are valid, interior, and informative") {
  for (int i = 0; i < 100; ++i) {
    auto rng = substream(7, i);
    const World w = generate_problem(rng);
    validate_world(w);
    CHECK(interior_world(w));
    CHECK(w.num_types() >= 2);
    CHECK(w.num_types() <= 20);
    for (const auto& p : w.high_prob) {
      CHECK(p >= Rat(1, 100));
      CHECK(p <= Rat(99, 100));
    }
    CHECK(likelihood_ratio_check(w, 4).ok);
  }
}

TEST_CASE("type counts are close to uniform") {
  std::vector<int> counts(21, 0);
  for (int i = 0; i < 1000; ++i) {
    auto rng = substream(123, i);
    ++counts[generate_problem(rng).num_types()];
  }
  const double expected = 1000.0 / 19.0;
  double chi2 = 0;
  for (int t = 2; t <= 20; ++t) {
    const double d = counts[t] - expected;
    chi2 += d * d / expected;
  }
  // 18 degrees of freedom at the 0.001 tail.
  CHECK(chi2 < 42.32);
}

TEST_CASE("cost curve table shape and determinism") {
  const auto cfg = tiny(9, 3, {4});
  const std::string table = run_cost_curve(cfg, Scenario::dominant);
  CHECK(table.rfind("# peerpay cost-curve", 0) == 0);
  CHECK(table.find("# scenario=dominant\n") != std::string::npos);
  CHECK(table.find("n_agents,n_col,fraction,mean_normalized_cost,"
                   "samples_used,infeasible\n") != std::string::npos);

  const auto rows = data_rows(table);
  REQUIRE(rows.size() == 2);  // coalition sizes 1 and 2 at N=4
  const auto first = fields(rows[0]);
  REQUIRE(first.size() == 6);
  CHECK(first[0] == "4");
  CHECK(first[1] == "1");
  CHECK(first[2] == "0.25");
  CHECK(first[3] == "1");  // lone colluder: the plain truthful program
  CHECK(first[4] == "3");
  CHECK(first[5] == "0");
  const auto second = fields(rows[1]);
  REQUIRE(second.size() == 6);
  CHECK(std::stoi(second[4]) + std::stoi(second[5]) == 3);

  CHECK(run_cost_curve(cfg, Scenario::dominant) == table);

  auto parallel = cfg;
  parallel.workers = 3;
  CHECK(run_cost_curve(parallel, Scenario::dominant) == table);

  setenv("PEERPAY_WORKERS", "3", 1);
  const std::string via_env = run_cost_curve(cfg, Scenario::dominant);
  unsetenv("PEERPAY_WORKERS");
  CHECK(via_env == table);
}

TEST_CASE("sybil curve reduces to the truthful optimum for a lone sybil") {
  const std::string table = run_cost_curve(tiny(11, 2, {4}), Scenario::sybil);
  const auto rows = data_rows(table);
  REQUIRE(rows.size() == 3);  // coalition sizes 1..3 at N=4
  const auto first = fields(rows[0]);
  CHECK(first[1] == "1");
  CHECK(first[3] == "1");
  CHECK(first[4] == "2");
  CHECK(first[5] == "0");
}

TEST_CASE("coalition bound tables") {
  const std::string single = run_coalition_bound(tiny(5, 1, {4}));
  const auto rows = data_rows(single);
  REQUIRE(rows.size() == 3);  // bounds 2, 1, 0, largest first
  CHECK(fields(rows[0])[1] == "2");
  CHECK(fields(rows[2])[1] == "0");
  int total = 0;
  bool saw_point_mass = false;
  for (const auto& row : rows) {
    const auto f = fields(row);
    REQUIRE(f.size() == 4);
    total += std::stoi(f[2]);
    if (f[2] == "1") {
      saw_point_mass = true;
      CHECK(f[3] == "1");
    }
  }
  CHECK(total == 1);
  CHECK(saw_point_mass);

  // Nearly every problem at N=5 protects against the ceiling of two.
  const std::string five = run_coalition_bound(tiny(31, 20, {5}));
  for (const auto& row : data_rows(five)) {
    const auto f = fields(row);
    if (f[1] == "2") CHECK(std::stoi(f[2]) >= 18);
  }
}

TEST_CASE("concept comparison instances stay ordered") {
  const std::string table = run_concept_comparison(tiny(3, 2, {4}));
  const auto rows = data_rows(table);
  REQUIRE(rows.size() == 4);  // two coalition sizes, two problems each
  for (const auto& row : rows) {
    const auto f = fields(row);
    REQUIRE(f.size() == 7);
    if (f[1] == "1") {
      // All three concepts collapse to the plain truthful program.
      CHECK(f[4] == "1");
      CHECK(f[5] == "1");
      CHECK(f[6] == "1");
    } else if (f[4] != "nan" && f[5] != "nan" && f[6] != "nan") {
      const double pareto = std::stod(f[4]);
      const double unique = std::stod(f[5]);
      const double dominant = std::stod(f[6]);
      CHECK(pareto <= unique + 1e-9);
      CHECK(unique <= dominant + 1e-9);
    }
  }

  const std::string empty = run_concept_comparison(tiny(1, 1, {}));
  CHECK(data_rows(empty).empty());
  CHECK(empty.rfind("# peerpay concept-compare", 0) == 0);
}

TEST_CASE("relaxing uniqueness to a pareto guarantee saves money") {
  DesignRequest req;
  req.world = make_plumber();
  req.n_agents = 4;
  req.scenario = Scenario::pareto_symmetric;
  const auto pareto = design(req);
  req.scenario = Scenario::unique_symmetric;
  const auto unique = design(req);
  const World w = make_plumber();
  CHECK(scheme_cost(pareto, w, Objective::per_report) <
        scheme_cost(unique, w, Objective::per_report));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(run_coalition_bound(tiny(1, 0, {4})), MalformedInput);
  CHECK_THROWS_AS(run_coalition_bound(tiny(1, 1, {1})), MalformedInput);
  auto bad_margin = tiny(1, 1, {4});
  bad_margin.margin = 0;
  CHECK_THROWS_AS(run_coalition_bound(bad_margin), MalformedInput);
  auto bad_precision = tiny(1, 1, {4});
  bad_precision.precision = 0;
  CHECK_THROWS_AS(run_coalition_bound(bad_precision), MalformedInput);
  CHECK_THROWS_AS(run_cost_curve(tiny(1, 1, {4}), Scenario::optimal_ic),
                  MalformedInput);
}
