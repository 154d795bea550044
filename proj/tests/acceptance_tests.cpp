// Acceptance gate: one line per criterion, tolerances pinned in code, exit
// nonzero when any line fails.  The two ten-agent table runs come last; every
// other criterion finishes in seconds on one core.
#include <peerpay/beliefs.hpp>
#include <peerpay/designers.hpp>
#include <peerpay/errors.hpp>
#include <peerpay/harness.hpp>
#include <peerpay/mechanism.hpp>
#include <peerpay/rng.hpp>
#include <peerpay/verifier.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace peerpay;
using peerpay::testing::make_plumber;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int index, const std::string& label, bool ok,
            const std::string& detail = std::string()) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << index << ": "
            << label;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool close(const Rat& got, double want, double tol) {
  return std::abs(to_double(got) - want) <= tol;
}

// 1% relative for nonzero table cells, small absolute slack for zeros.
bool table_cell(const Rat& got, double want) {
  if (want == 0.0) return std::abs(to_double(got)) <= 0.02;
  return std::abs(to_double(got) - want) <= 0.01 * std::abs(want);
}

DesignRequest request(Scenario scenario, int n_agents, int n_col = 1) {
  DesignRequest req;
  req.world = make_plumber();
  req.n_agents = n_agents;
  req.scenario = scenario;
  req.n_col = n_col;
  return req;
}

ProfileCounts profile(int n_neg, int n_pos, int n_honest, int n_lie) {
  ProfileCounts c;
  c.n_neg = n_neg;
  c.n_pos = n_pos;
  c.n_honest = n_honest;
  c.n_lie = n_lie;
  return c;
}

struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state >> 33;
  }
  int uniform(int lo, int hi) {
    return lo +
           static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

World random_world(TestRng& rng, int n_types) {
  World w;
  Rat weight_sum = 0;
  std::vector<int> used;
  for (int t = 0; t < n_types; ++t) {
    w.types.push_back("t" + std::to_string(t));
    w.prior.push_back(Rat(rng.uniform(1, 9)));
    weight_sum += w.prior.back();
    int draw = rng.uniform(5, 95);
    while (std::find(used.begin(), used.end(), draw) != used.end()) {
      draw = rng.uniform(5, 95);
    }
    used.push_back(draw);
    w.high_prob.push_back(Rat(draw, 100));
  }
  for (auto& p : w.prior) p /= weight_sum;
  return w;
}

// Independent oracle: sum payoffs over every observation vector of the other
// agents, weighting by the exact mixture probability.
Rat brute_force_payoff(const PaymentScheme& s, const World& w, Strategy mine,
                       const ProfileCounts& others, int obs) {
  const int m = others.total();
  const auto post = posterior(w, obs);
  std::vector<Strategy> roles;
  for (int i = 0; i < others.n_neg; ++i) roles.push_back(Strategy::all_neg);
  for (int i = 0; i < others.n_pos; ++i) roles.push_back(Strategy::all_pos);
  for (int i = 0; i < others.n_honest; ++i) roles.push_back(Strategy::honest);
  for (int i = 0; i < others.n_lie; ++i) roles.push_back(Strategy::lie);

  const int r_mine = strategy_report(mine, obs);
  Rat value = 0;
  for (int mask = 0; mask < (1 << m); ++mask) {
    Rat prob = 0;
    for (std::size_t t = 0; t < w.num_types(); ++t) {
      Rat term = post[t];
      for (int i = 0; i < m; ++i) {
        term *= (mask >> i) & 1 ? w.high_prob[t] : 1 - w.high_prob[t];
      }
      prob += term;
    }
    int n = 0;
    for (int i = 0; i < m; ++i) {
      n += strategy_report(roles[i], (mask >> i) & 1);
    }
    value += prob * s.pay(r_mine, n);
  }
  return value;
}

// Data rows of an emitted table: comment lines and the header row stripped,
// cells split on commas.
std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double cell_num(const std::string& text) {
  return std::strtod(text.c_str(), nullptr);
}

void criterion1() {
  const auto t0 = Clock::now();
  const World w = make_plumber();
  const auto s = design(request(Scenario::optimal_ic, 2));
  const ProfileCounts other = profile(0, 0, 1, 0);
  const Rat honest_high = expected_payoff(s, w, Strategy::honest, other, 1);
  const Rat lie_high = expected_payoff(s, w, Strategy::lie, other, 1);
  const Rat honest_low = expected_payoff(s, w, Strategy::honest, other, 0);
  const Rat lie_low = expected_payoff(s, w, Strategy::lie, other, 0);
  const double dt = seconds_since(t0);
  const bool ok = close(s.pay0[0], 2.62, 0.01) && close(s.pay1[1], 1.54, 0.01) &&
                  close(honest_high, 1.34, 0.01) && close(lie_high, 0.34, 0.01) &&
                  close(honest_low, 1.60, 0.01) && close(lie_low, 0.60, 0.01) &&
                  dt < 1.0;
  std::ostringstream oss;
  oss << "pays " << format_sig(s.pay0[0], 4) << "/" << format_sig(s.pay1[1], 4)
      << ", quadruple " << format_sig(honest_high, 4) << " "
      << format_sig(lie_high, 4) << " " << format_sig(honest_low, 4) << " "
      << format_sig(lie_low, 4);
  report(1, "two-agent optimum and its payoff quadruple", ok, oss.str());
}

void criterion2() {
  const World w = make_plumber();
  const auto after_low = reference_distribution(w, posterior(w, 0), 3);
  const auto after_high = reference_distribution(w, posterior(w, 1), 3);
  const double want_low[] = {0.4179, 0.2297, 0.1168, 0.2356};
  const double want_high[] = {0.0255, 0.0389, 0.2356, 0.7};
  bool ok = after_low.size() == 4 && after_high.size() == 4;
  for (int n = 0; ok && n <= 3; ++n) {
    ok = close(after_low[n], want_low[n], 0.0001) &&
         close(after_high[n], want_high[n], 0.0001);
  }
  report(2, "reference-report distributions after each signal", ok);
}

void criterion3() {
  const World w = make_plumber();
  const auto s = design(request(Scenario::unique_symmetric, 4));
  bool ok = close(s.pay0[1], 12.37, 0.01) && close(s.pay1[2], 6.29, 0.01);
  // The destabilization rows close at zero gap, so the lying profile can
  // survive only as a knife-edge tie; the strict reading separates honest
  // play, and the constant profiles are not equilibria at all.
  ok = ok && analyze_profile(s, w, profile(0, 0, 4, 0)).is_strict_ne;
  ok = ok && !analyze_profile(s, w, profile(0, 4, 0, 0)).is_ne;
  ok = ok && !analyze_profile(s, w, profile(4, 0, 0, 0)).is_ne;
  ok = ok && !analyze_profile(s, w, profile(0, 0, 0, 4)).is_strict_ne;
  report(3, "unique-equilibrium table, honesty the lone symmetric survivor",
         ok);
}

void criterion4() {
  const World w = make_plumber();
  const auto s = design(request(Scenario::pareto_symmetric, 4));
  bool ok = close(s.pay0[0], 1.30, 0.01) && close(s.pay0[1], 4.52, 0.01) &&
            close(s.pay1[2], 1.26, 0.01) && close(s.pay1[3], 1.30, 0.01);
  const ProfileCounts honest = profile(0, 0, 4, 0);
  for (const ProfileCounts& rival :
       {profile(4, 0, 0, 0), profile(0, 4, 0, 0), profile(0, 0, 0, 4)}) {
    const auto rep = analyze_profile(s, w, rival);
    const auto cmp = pareto_compare(s, w, honest, rival);
    ok = ok && !(rep.is_strict_ne && cmp.b_weakly_dominates);
  }
  report(4, "capped-collusion table, no lying equilibrium beats honesty", ok);
}

void criterion5() {
  const World w = make_plumber();
  const auto s = design(request(Scenario::full_asymmetric_pareto, 4));
  const auto all = enumerate_profiles(s, w);
  const auto strict = enumerate_pure_equilibria(s, w, true);
  bool ok = all.size() == 35 && strict.size() == 3;
  if (ok) {
    ok = strict[0].profile == profile(0, 0, 4, 0) &&
         strict[1].profile == profile(0, 4, 0, 0) &&
         strict[2].profile == profile(4, 0, 0, 0);
  }
  std::ostringstream oss;
  oss << all.size() << " profiles, " << strict.size() << " strict equilibria";
  report(5, "sparse family keeps exactly honest and the two consensus profiles",
         ok, oss.str());
}

void criterion6() {
  const World w = make_plumber();
  const auto s = design(request(Scenario::dominant, 4, 2));
  bool ok = close(s.pay0[0], 1.575, 0.005) && close(s.pay0[1], 3.575, 0.005) &&
            close(s.pay1[2], 2.203, 0.005) && close(s.pay1[3], 0.943, 0.005);
  // Expected payments of an insider who saw high quality, against the two
  // possible reports of the fellow insider, outsiders honest.
  const auto seen = reference_given_observation(w, 1, 2);
  const auto stay = [&](int rep, int shift) {
    Rat v = 0;
    for (int m = 0; m <= 2; ++m) v += seen[m] * s.pay(rep, m + shift);
    return v;
  };
  ok = ok && close(stay(1, 0), 1.715, 0.005) && close(stay(0, 0), 0.715, 0.005);
  ok = ok && close(stay(1, 1), 1.138, 0.005) && close(stay(0, 1), 0.138, 0.005);
  ok = ok && is_dominant_honest(s, w, 2, Rat(1)).ok;
  bool refused = false;
  try {
    design(request(Scenario::dominant, 4, 3));
  } catch (const Infeasible&) {
    refused = true;
  }
  ok = ok && refused;
  report(6, "pair-coalition dominant table and its three-insider ceiling", ok);
}

void criterion7() {
  const World w = make_plumber();
  const auto s3 = design(request(Scenario::sybil, 6, 3));
  const double want0_3[] = {20.85, 0, 0, 0, 4.40, 9.98};
  const double want1_3[] = {45.54, 28.78, 0, 0, 0, 4.31};
  bool triple_table = true;
  for (int n = 0; n < 6; ++n) {
    triple_table = triple_table && table_cell(s3.pay0[n], want0_3[n]) &&
                   table_cell(s3.pay1[n], want1_3[n]);
  }
  bool triple_best = true;
  for (int c = 0; c <= 3; ++c) {
    const auto best = coalition_best_report(s3, w, 3, c);
    triple_best = triple_best && best.report == c && best.strict;
  }

  const auto s5 = design(request(Scenario::sybil, 6, 5));
  const double want0_5[] = {3455, 0, 1378, 615, 0, 1125};
  const double want1_5[] = {1530, 5569, 4674, 3736, 0, 2585};
  bool five_table = true;
  for (int n = 0; n < 6; ++n) {
    five_table = five_table && table_cell(s5.pay0[n], want0_5[n]) &&
                 table_cell(s5.pay1[n], want1_5[n]);
  }
  bool five_best = true;
  for (int c = 0; c <= 5; ++c) {
    const auto best = coalition_best_report(s5, w, 5, c);
    five_best = five_best && best.report == c && best.strict;
  }

  const bool ok = triple_table && triple_best && five_table && five_best;
  std::ostringstream oss;
  oss << "three-identity table " << (triple_table ? "ok" : "off")
      << ", best replies " << (triple_best ? "ok" : "off")
      << "; five-identity table " << (five_table ? "ok" : "off")
      << ", best replies " << (five_best ? "ok" : "off");
  if (!five_table) {
    oss << "; the quoted five-identity entries violate their own revenue"
           " constraints, the solver keeps its cheaper feasible optimum";
  }
  report(7, "sybil-proof tables and block best replies", ok, oss.str());
}

void criterion8() {
  const auto t0 = Clock::now();
  TestRng rng(88);
  bool ok = true;

  int pair_matched = 0;
  int pair_trials = 0;
  while (pair_matched < 100 && pair_trials < 130) {
    const World w = random_world(rng, 2 + pair_trials % 4);
    const int n = 2 + pair_trials % 7;
    ++pair_trials;
    try {
      DesignRequest req;
      req.world = w;
      req.n_agents = n;
      req.scenario = Scenario::optimal_ic;
      const auto lp = design(req);
      const auto closed = closed_form_optimal_ic(w, n, req.margin);
      if (lp.pay0 == closed.pay0 && lp.pay1 == closed.pay1) {
        ++pair_matched;
      } else {
        ok = false;
      }
    } catch (const DegenerateWorld&) {
    }
  }

  // The interior-support closed form may legitimately lose to the solver when
  // the optimum pays a reference count off that support; such departures must
  // be certified: strictly cheaper solver table, closed form still strictly
  // truthful at full margin.
  int interior_matched = 0;
  int certified = 0;
  int interior_trials = 0;
  while (interior_matched < 50 && interior_trials < 90) {
    const World w = random_world(rng, 2 + interior_trials % 3);
    const int n = 4 + interior_trials % 5;
    ++interior_trials;
    try {
      DesignRequest req;
      req.world = w;
      req.n_agents = n;
      req.scenario = Scenario::unique_symmetric;
      const auto lp = design(req);
      const auto closed =
          closed_form_unique_symmetric(w, n, req.margin, req.margin / 1000);
      if (lp.pay0 == closed.pay0 && lp.pay1 == closed.pay1) {
        ++interior_matched;
        continue;
      }
      bool off_support = false;
      for (int i = 0; i < n; ++i) {
        if (i != 1 && i != n - 1 && lp.pay0[i] != 0) off_support = true;
        if (i != 0 && i != n - 2 && lp.pay1[i] != 0) off_support = true;
      }
      const bool cheaper =
          honest_expected_value(lp, w) < honest_expected_value(closed, w);
      const auto honest = analyze_profile(closed, w, profile(0, 0, n, 0));
      if (off_support && cheaper && honest.is_strict_ne &&
          honest.margin >= req.margin) {
        ++certified;
      } else {
        ok = false;
      }
    } catch (const DegenerateWorld&) {
    }
  }

  const double dt = seconds_since(t0);
  ok = ok && pair_matched >= 100 && interior_matched >= 50 && dt < 60.0;
  std::ostringstream oss;
  oss << "pair form " << pair_matched << "/" << pair_trials
      << " exact, interior form " << interior_matched << " exact plus "
      << certified << " certified departures, "
      << static_cast<int>(dt * 1000) << " ms";
  report(8, "closed forms track the optimizing programs", ok, oss.str());
}

void criterion9() {
  TestRng rng(99);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const World w = random_world(rng, 2 + trial % 5);
    const int m = 1 + trial % 10;
    if (!likelihood_ratio_check(w, m).ok) ++violations;
  }
  std::ostringstream oss;
  oss << violations << " violations in 1000 worlds";
  report(9, "likelihood ratios increase in the positive-report count",
         violations == 0, oss.str());
}

void criterion10() {
  TestRng rng(1010);
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const World w = random_world(rng, 2 + trial % 4);
    const int n = 4 + trial % 3;
    DesignRequest req;
    req.world = w;
    req.n_agents = n;
    req.scenario = Scenario::optimal_ic;
    const auto s = design(req);
    bool constant_found = false;
    bool honest_found = false;
    for (const auto& eq : enumerate_pure_equilibria(s, w, false)) {
      if (eq.profile == profile(n, 0, 0, 0) ||
          eq.profile == profile(0, n, 0, 0)) {
        constant_found = true;
      }
      if (eq.profile == profile(0, 0, n, 0)) honest_found = true;
    }
    ok = ok && constant_found && honest_found;
  }
  report(10, "plain optima always admit a constant-reporting equilibrium", ok);
}

void criterion11() {
  TestRng rng(1111);
  bool ok = true;
  int offending = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const World w = random_world(rng, 2 + trial % 4);
    const int n = 5 + trial % 4;
    DesignRequest req;
    req.world = w;
    req.n_agents = n;
    req.scenario = Scenario::full_asymmetric_pareto;
    const auto s = design(req);
    // Among profiles light on constant reporters, an honest agent and a liar
    // can never both hold their reports, nor can a lone pair of opposite
    // constants.
    for (const auto& eq : enumerate_pure_equilibria(s, w, false)) {
      const auto& p = eq.profile;
      const bool light = p.n_neg <= 1 && p.n_pos <= 1;
      const bool coexist = (p.n_honest >= 1 && p.n_lie >= 1) ||
                           (p.n_neg == 1 && p.n_pos == 1);
      if (light && coexist) ++offending;
    }
  }
  ok = offending == 0;
  std::ostringstream oss;
  oss << offending << " coexistence equilibria in 50 worlds";
  report(11, "honest agents and liars never share a two-payment equilibrium",
         ok, oss.str());
}

void criterion12() {
  TestRng rng(1212);
  bool ok = true;
  int cases = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const World w = random_world(rng, 2 + trial % 4);
    const int n = 2 + trial % 5;
    PaymentScheme s;
    s.n_agents = n;
    for (int i = 0; i < n; ++i) {
      if (trial % 2 == 0) {
        s.pay0.push_back(Rat(3 * i + 2, 7));
        s.pay1.push_back(Rat(i * i + 5, 11));
      } else {
        s.pay0.push_back(Rat(rng.uniform(0, 50), rng.uniform(1, 9)));
        s.pay1.push_back(Rat(rng.uniform(0, 50), rng.uniform(1, 9)));
      }
    }
    for (int pick = 0; pick < 4; ++pick) {
      int rem = n - 1;
      const int a = rng.uniform(0, rem);
      rem -= a;
      const int b = rng.uniform(0, rem);
      rem -= b;
      const int c = rng.uniform(0, rem);
      rem -= c;
      const ProfileCounts others = profile(a, b, c, rem);
      const Strategy mine = kStrategies[rng.uniform(0, 3)];
      const int obs = rng.uniform(0, 1);
      ++cases;
      if (expected_payoff(s, w, mine, others, obs) !=
          brute_force_payoff(s, w, mine, others, obs)) {
        ok = false;
      }
    }
  }
  ok = ok && cases >= 100;
  std::ostringstream oss;
  oss << cases << " exact comparisons";
  report(12, "interim values equal brute-force observation enumeration", ok,
         oss.str());
}

void criterion13() {
  const auto t0 = Clock::now();
  int at_ceiling = 0;
  for (int i = 0; i < 200; ++i) {
    auto stream = substream(101, i);
    const World w = generate_problem(stream);
    if (max_coalition(w, 5, Rat(1), Scenario::dominant) == 2) ++at_ceiling;
  }
  const double dt = seconds_since(t0);
  const bool ok = at_ceiling >= 196 && dt < 300.0;
  std::ostringstream oss;
  oss << at_ceiling << "/200 protect both-insider coalitions, "
      << static_cast<int>(dt * 1000) << " ms";
  report(13, "five-agent coalition ceiling survey", ok, oss.str());
}

ExperimentConfig ten_agent_config() {
  ExperimentConfig cfg;
  cfg.seed = 2009;
  cfg.samples = 100;
  cfg.agent_counts = {10};
  cfg.margin = 1;
  return cfg;
}

void criterion14() {
  const auto csv = run_cost_curve(ten_agent_config(), Scenario::dominant);
  const auto rows = data_rows(csv);
  std::map<int, double> mean;
  for (const auto& row : rows) {
    if (row.size() >= 4) mean[static_cast<int>(cell_num(row[1]))] = cell_num(row[3]);
  }
  const bool shape_ok = mean.size() == 5;
  const bool small_cheap =
      shape_ok && mean[1] <= 1.5 && mean[2] <= 1.5 && mean[3] <= 1.5;
  const bool growing = shape_ok && mean[3] < mean[4] && mean[4] < mean[5];
  const bool ok = shape_ok && small_cheap && growing;
  std::ostringstream oss;
  oss.precision(3);
  if (shape_ok) {
    oss << "means " << mean[1] << " " << mean[2] << " " << mean[3] << " "
        << mean[4] << " " << mean[5] << "; up-to-a-third bound 1.5 "
        << (small_cheap ? "met" : "exceeded") << ", growth beyond "
        << (growing ? "strict" : "broken");
  } else {
    oss << "curve rows missing";
  }
  report(14, "mean dominant cost at ten agents: cheap below a third, growing"
             " beyond",
         ok, oss.str());
}

void criterion15() {
  bool ordering_ok = true;
  std::size_t rows_seen = 0;
  std::string note;
  try {
    const auto csv = run_concept_comparison(ten_agent_config());
    const auto rows = data_rows(csv);
    rows_seen = rows.size();
    for (const auto& row : rows) {
      if (row.size() < 7) {
        ordering_ok = false;
        continue;
      }
      const double pareto = cell_num(row[4]);
      const double unique = cell_num(row[5]);
      const double dominant = cell_num(row[6]);
      if (std::isnan(pareto) || std::isnan(unique) || std::isnan(dominant) ||
          pareto > unique || unique > dominant) {
        ordering_ok = false;
      }
    }
    ordering_ok = ordering_ok && rows_seen == 500;
  } catch (const InternalContradiction& e) {
    ordering_ok = false;
    note = e.what();
  }

  TestRng rng(1515);
  bool monotone = true;
  int compared = 0;
  int attempts = 0;
  while (compared < 20 && attempts < 26) {
    const World w = random_world(rng, 2 + attempts % 4);
    ++attempts;
    try {
      const Rat c4 = scheme_cost(closed_form_optimal_ic(w, 4, Rat(1)), w,
                                 Objective::per_report);
      const Rat c6 = scheme_cost(closed_form_optimal_ic(w, 6, Rat(1)), w,
                                 Objective::per_report);
      const Rat c8 = scheme_cost(closed_form_optimal_ic(w, 8, Rat(1)), w,
                                 Objective::per_report);
      monotone = monotone && c4 >= c6 && c6 >= c8;
      ++compared;
    } catch (const DegenerateWorld&) {
    }
  }
  monotone = monotone && compared >= 20;

  const bool ok = ordering_ok && monotone;
  std::ostringstream oss;
  oss << rows_seen << " instance rows ordered, " << compared
      << " worlds with per-report cost non-increasing in the population";
  if (!note.empty()) oss << "; " << note;
  report(15, "concept cost ordering and population monotonicity", ok,
         oss.str());
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  criterion12();
  criterion13();
  criterion14();
  criterion15();
  std::cout << (15 - failures) << "/15 criteria passed in "
            << static_cast<int>(seconds_since(t0)) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
