#include <peerpay/designers.hpp>

#include <peerpay/beliefs.hpp>
#include <peerpay/errors.hpp>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace peerpay {

namespace {

constexpr Scenario kAllScenarios[] = {
    Scenario::optimal_ic,          Scenario::unique_symmetric,
    Scenario::pareto_symmetric,    Scenario::full_asymmetric_pareto,
    Scenario::partial_symmetric,   Scenario::partial_asymmetric,
    Scenario::dominant,            Scenario::sybil,
};

// Linear rows over the 2N-entry payment table: x[n] = tau(0,n),
// x[N+n] = tau(1,n).
class RowBuilder {
 public:
  RowBuilder(const World& w, int n_agents)
      : w_(w), n_(n_agents), sig_(signal_prior(w)) {}

  int vars() const { return 2 * n_; }
  int idx(int report, int others_high) const {
    return report * n_ + others_high;
  }
  std::vector<Rat> zeros() const { return std::vector<Rat>(vars(), Rat(0)); }

  // Value of reporting `report` at observation `obs` against `others`.
  void add_value(std::vector<Rat>& row, int obs, int report,
                 const ProfileCounts& others, const Rat& scale) const {
    const auto dist = report_count_distribution(w_, obs, others);
    for (int n = 0; n < n_; ++n) {
      if (dist[n] != 0) row[idx(report, n)] += scale * dist[n];
    }
  }

  // Gain of reporting `to` instead of `from` at observation `obs`.
  std::vector<Rat> report_gain(int obs, int from, int to,
                               const ProfileCounts& others) const {
    auto row = zeros();
    add_value(row, obs, to, others, Rat(1));
    add_value(row, obs, from, others, Rat(-1));
    return row;
  }

  // Ex-ante value of playing `s` while the rest follow `others`.
  std::vector<Rat> strategy_value(Strategy s,
                                  const ProfileCounts& others) const {
    auto row = zeros();
    for (int obs = 0; obs < 2; ++obs) {
      add_value(row, obs, strategy_report(s, obs), others, sig_[obs]);
    }
    return row;
  }

  ProfileCounts honest_others() const {
    ProfileCounts c;
    c.n_honest = n_ - 1;
    return c;
  }

  // Truth-telling gain at observation `obs` with everyone else honest.
  std::vector<Rat> ic_gain(int obs) const {
    return report_gain(obs, 1 - obs, obs, honest_others());
  }

  // Per-report honest value.
  std::vector<Rat> honest_value() const {
    return strategy_value(Strategy::honest, honest_others());
  }

  std::vector<Rat> objective_row(Objective objective) const {
    auto row = honest_value();
    if (objective == Objective::total_budget) {
      for (auto& c : row) c *= n_;
    }
    return row;
  }

 private:
  const World& w_;
  int n_;
  std::vector<Rat> sig_;
};

void require_world_and_margin(const DesignRequest& req) {
  validate_world(req.world);
  if (req.margin < 0) {
    throw MalformedProgram("margin must be nonnegative");
  }
  if (req.delta < 0) {
    throw MalformedProgram("delta must be nonnegative");
  }
}

void require_agents(const DesignRequest& req, int minimum) {
  if (req.n_agents < minimum) {
    throw TooFewAgents("scenario " +
                       std::string(scenario_name(req.scenario)) + " needs " +
                       std::to_string(minimum) + " agents, got " +
                       std::to_string(req.n_agents));
  }
}

Rat small_gap(const DesignRequest& req) {
  if (req.margin <= 0) {
    throw MalformedProgram("this scenario needs a positive margin");
  }
  Rat eps = req.epsilon.value_or(req.margin / 1000);
  if (eps <= 0 || eps >= req.margin) {
    throw MalformedProgram("epsilon must lie strictly between 0 and margin");
  }
  return eps;
}

Constraint ge_row(std::vector<Rat> coeffs, Rat rhs) {
  return Constraint{std::move(coeffs), Rel::ge, std::move(rhs)};
}

Constraint eq_row(std::vector<Rat> coeffs, Rat rhs) {
  return Constraint{std::move(coeffs), Rel::eq, std::move(rhs)};
}

// row > 0, closed to row >= gap.
Constraint strict_pos(std::vector<Rat> coeffs, const Rat& gap) {
  return close_strict(Constraint{std::move(coeffs), Rel::gt, Rat(0)}, gap);
}

// row < 0, closed to row <= -gap.
Constraint strict_neg(std::vector<Rat> coeffs, const Rat& gap) {
  return close_strict(Constraint{std::move(coeffs), Rel::lt, Rat(0)}, gap);
}

std::vector<Rat> minus(std::vector<Rat> a, const std::vector<Rat>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

ProfileCounts make_counts(int n_neg, int n_pos, int n_honest, int n_lie) {
  ProfileCounts c;
  c.n_neg = n_neg;
  c.n_pos = n_pos;
  c.n_honest = n_honest;
  c.n_lie = n_lie;
  return c;
}

ProfileCounts uniform_block(Strategy s, int size) {
  switch (s) {
    case Strategy::all_neg: return make_counts(size, 0, 0, 0);
    case Strategy::all_pos: return make_counts(0, size, 0, 0);
    case Strategy::honest: return make_counts(0, 0, size, 0);
    case Strategy::lie: return make_counts(0, 0, 0, size);
  }
  throw MalformedInput("unknown strategy value");
}

PaymentScheme scheme_from_solution(const DesignRequest& req,
                                   const std::vector<Rat>& x) {
  PaymentScheme s;
  s.n_agents = req.n_agents;
  const int n = req.n_agents;
  s.pay0.assign(x.begin(), x.begin() + n);
  s.pay1.assign(x.begin() + n, x.begin() + 2 * n);
  s.lambda = req.margin;
  s.scenario = scenario_name(req.scenario);
  s.world = world_digest(req.world);
  return s;
}

PaymentScheme finish(const DesignRequest& req, const Solution& sol) {
  if (sol.status == SolveStatus::infeasible) {
    throw Infeasible("no payment table satisfies scenario " +
                     std::string(scenario_name(req.scenario)));
  }
  if (sol.status != SolveStatus::optimal) {
    throw InternalContradiction(
        "cost program unbounded despite nonnegative payments");
  }
  return scheme_from_solution(req, sol.x);
}

LinearProgram base_truthful_program(const DesignRequest& req,
                                    const RowBuilder& rb) {
  LinearProgram lp;
  lp.num_vars = rb.vars();
  lp.objective = rb.objective_row(req.objective);
  lp.rows.push_back(ge_row(rb.ic_gain(1), req.margin));
  lp.rows.push_back(ge_row(rb.ic_gain(0), req.margin));
  return lp;
}

// Colluder block profiles destabilized by the asymmetric designs: everyone
// lies, or one defector to a constant report among liars.
std::vector<ProfileCounts> figure_block_profiles(int n_col) {
  std::vector<ProfileCounts> out;
  out.push_back(make_counts(0, 0, 0, n_col));
  if (n_col > 1) {
    out.push_back(make_counts(1, 0, 0, n_col - 1));
    out.push_back(make_counts(0, 1, 0, n_col - 1));
  }
  return out;
}

std::vector<ProfileCounts> all_block_profiles(int n_col) {
  std::vector<ProfileCounts> out;
  for (int n_neg = 0; n_neg <= n_col; ++n_neg) {
    for (int n_pos = 0; n_neg + n_pos <= n_col; ++n_pos) {
      for (int n_honest = 0; n_neg + n_pos + n_honest <= n_col; ++n_honest) {
        if (n_honest == n_col) continue;
        out.push_back(make_counts(n_neg, n_pos, n_honest,
                                  n_col - n_neg - n_pos - n_honest));
      }
    }
  }
  return out;
}

// One destabilization group for a colluder block embedded among honest
// outsiders: some present member must gain by flipping one of its reports
// (so the profile is not an equilibrium) or, in pareto mode, be paid
// strictly less ex ante than the honest value.
DisjunctGroup destabilize_block(const RowBuilder& rb,
                                const ProfileCounts& block, int outsiders,
                                CollusionMode mode,
                                const std::vector<Rat>& honest_value,
                                const Rat& delta) {
  DisjunctGroup group;
  for (Strategy s : kStrategies) {
    if (block.count(s) == 0) continue;
    ProfileCounts others = block.minus_one(s);
    others.n_honest += outsiders;
    for (int obs = 0; obs < 2; ++obs) {
      const int stay = strategy_report(s, obs);
      group.options.push_back(
          {{strict_pos(rb.report_gain(obs, stay, 1 - stay, others), delta)}});
    }
  }
  if (mode == CollusionMode::pareto) {
    for (Strategy s : kStrategies) {
      if (block.count(s) == 0) continue;
      ProfileCounts others = block.minus_one(s);
      others.n_honest += outsiders;
      group.options.push_back({{strict_neg(
          minus(rb.strategy_value(s, others), honest_value), delta)}});
    }
  }
  return group;
}

PaymentScheme design_figure_family(const DesignRequest& req, int n_col,
                                   CollusionMode mode) {
  require_agents(req, 4);
  const int n = req.n_agents;
  if (n_col < 1 || n_col > n) {
    throw IndexOutOfRange("coalition size must lie in [1, n_agents]");
  }
  const Rat eps = small_gap(req);
  RowBuilder rb(req.world, n);
  DisjunctiveProgram program;
  program.base = base_truthful_program(req, rb);
  const auto honest_value = rb.honest_value();

  std::vector<ProfileCounts> blocks;
  if (req.full_table) {
    if (n > 6) {
      throw CombinatorialGuardExceeded(
          "full-table destabilization is limited to 6 agents");
    }
    blocks = all_block_profiles(n_col);
  } else {
    // Pin the sparse support: the extreme cells pay eps, everything else is
    // zero except tau(0,1) and tau(1,N-2).
    auto pin = [&](int report, int col, Rat value) {
      auto row = rb.zeros();
      row[rb.idx(report, col)] = 1;
      program.base.rows.push_back(eq_row(std::move(row), std::move(value)));
    };
    pin(0, 0, eps);
    pin(1, n - 1, eps);
    for (int col = 0; col < n; ++col) {
      if (col != 0 && col != 1) pin(0, col, Rat(0));
      if (col != n - 1 && col != n - 2) pin(1, col, Rat(0));
    }
    blocks = figure_block_profiles(n_col);
  }
  for (const auto& block : blocks) {
    program.groups.push_back(destabilize_block(rb, block, n - n_col, mode,
                                               honest_value, req.delta));
  }
  auto sol = req.full_table ? solve_disjunctive_guided(program)
                            : solve_disjunctive(program, req.guard);
  auto scheme = finish(req, sol);
  scheme.epsilon = eps;
  return scheme;
}

Rat det2(const Rat& a, const Rat& b, const Rat& c, const Rat& d) {
  return a * d - b * c;
}

// Solves a11 x + a12 y = b1, a21 x + a22 y = b2 by Cramer's rule.
std::pair<Rat, Rat> solve2(const Rat& a11, const Rat& a12, const Rat& b1,
                           const Rat& a21, const Rat& a22, const Rat& b2) {
  const Rat d = det2(a11, a12, a21, a22);
  if (d == 0) {
    throw DegenerateWorld("closed form hit a singular 2x2 system");
  }
  return {det2(b1, a12, b2, a22) / d, det2(a11, b1, a21, b2) / d};
}

}  // namespace

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::optimal_ic: return "optimal-ic";
    case Scenario::unique_symmetric: return "unique-symmetric";
    case Scenario::pareto_symmetric: return "pareto-symmetric";
    case Scenario::full_asymmetric_pareto: return "full-asymmetric-pareto";
    case Scenario::partial_symmetric: return "partial-symmetric";
    case Scenario::partial_asymmetric: return "partial-asymmetric";
    case Scenario::dominant: return "dominant";
    case Scenario::sybil: return "sybil";
  }
  throw MalformedInput("unknown scenario value");
}

Scenario scenario_from_name(const std::string& name) {
  for (Scenario s : kAllScenarios) {
    if (name == scenario_name(s)) return s;
  }
  throw MalformedInput("unknown scenario name: " + name);
}

PaymentScheme design(const DesignRequest& req) {
  switch (req.scenario) {
    case Scenario::optimal_ic: return design_optimal_ic(req);
    case Scenario::unique_symmetric: return design_unique_symmetric(req);
    case Scenario::pareto_symmetric: return design_pareto_symmetric(req);
    case Scenario::full_asymmetric_pareto:
      return design_full_asymmetric_pareto(req);
    case Scenario::partial_symmetric: return design_partial_symmetric(req);
    case Scenario::partial_asymmetric: return design_partial_asymmetric(req);
    case Scenario::dominant: return design_dominant(req);
    case Scenario::sybil: return design_sybil(req);
  }
  throw MalformedInput("unknown scenario value");
}

PaymentScheme design_optimal_ic(const DesignRequest& req) {
  require_world_and_margin(req);
  require_agents(req, 2);
  RowBuilder rb(req.world, req.n_agents);
  return finish(req, solve_lp(base_truthful_program(req, rb)));
}

PaymentScheme design_unique_symmetric(const DesignRequest& req) {
  require_world_and_margin(req);
  require_agents(req, 4);
  const Rat eps = small_gap(req);
  const int n = req.n_agents;
  RowBuilder rb(req.world, n);
  DisjunctiveProgram program;
  program.base = base_truthful_program(req, rb);

  // Unanimity tie-breaks: an all-high panel pays disagreement better, an
  // all-low panel pays agreement better, which rules the constant profiles
  // out as equilibria.
  auto high_row = rb.zeros();
  high_row[rb.idx(0, n - 1)] = 1;
  high_row[rb.idx(1, n - 1)] = -1;
  program.base.rows.push_back(strict_pos(std::move(high_row), eps));
  auto low_row = rb.zeros();
  low_row[rb.idx(1, 0)] = 1;
  low_row[rb.idx(0, 0)] = -1;
  program.base.rows.push_back(strict_pos(std::move(low_row), eps));

  // Opposing a consensus pays exactly eps, which pins the support shape the
  // closed form mirrors; the gap rows above then zero the agreeing cells.
  auto pin = [&](int report, int col) {
    auto row = rb.zeros();
    row[rb.idx(report, col)] = 1;
    program.base.rows.push_back(eq_row(std::move(row), eps));
  };
  pin(0, n - 1);
  pin(1, 0);

  // Against everyone lying, some observation must prefer the truth.
  const ProfileCounts liars = make_counts(0, 0, 0, n - 1);
  DisjunctGroup group;
  group.options.push_back(
      {{strict_pos(rb.report_gain(0, 1, 0, liars), req.delta)}});
  group.options.push_back(
      {{strict_pos(rb.report_gain(1, 0, 1, liars), req.delta)}});
  program.groups.push_back(std::move(group));

  auto scheme = finish(req, solve_disjunctive(program, req.guard));
  scheme.epsilon = eps;
  return scheme;
}

PaymentScheme design_pareto_symmetric(const DesignRequest& req) {
  require_world_and_margin(req);
  require_agents(req, 2);
  const Rat eps = small_gap(req);
  const int n = req.n_agents;
  RowBuilder rb(req.world, n);
  DisjunctiveProgram program;
  program.base = base_truthful_program(req, rb);
  const auto honest_value = rb.honest_value();

  // The constant profiles pay a single cell each; cap those cells strictly
  // below the honest value so they are never weakly better for everyone.
  auto cap = [&](int report, int col) {
    auto row = rb.zeros();
    row[rb.idx(report, col)] = 1;
    program.base.rows.push_back(
        strict_neg(minus(std::move(row), honest_value), eps));
  };
  cap(1, n - 1);
  cap(0, 0);

  // Everyone-lies must fail as an equilibrium or pay below honesty.
  const ProfileCounts liars = make_counts(0, 0, 0, n - 1);
  DisjunctGroup group;
  group.options.push_back(
      {{strict_pos(rb.report_gain(0, 1, 0, liars), req.delta)}});
  group.options.push_back(
      {{strict_pos(rb.report_gain(1, 0, 1, liars), req.delta)}});
  group.options.push_back({{strict_neg(
      minus(rb.strategy_value(Strategy::lie, liars), honest_value),
      req.delta)}});
  program.groups.push_back(std::move(group));

  auto scheme = finish(req, solve_disjunctive(program, req.guard));
  scheme.epsilon = eps;
  return scheme;
}

PaymentScheme design_full_asymmetric_pareto(const DesignRequest& req) {
  require_world_and_margin(req);
  DesignRequest sub = req;
  sub.full_table = false;
  return design_figure_family(sub, req.n_agents, CollusionMode::pareto);
}

PaymentScheme design_partial_symmetric(const DesignRequest& req) {
  require_world_and_margin(req);
  require_agents(req, 2);
  const int n = req.n_agents;
  if (req.n_col < 1 || req.n_col >= n) {
    throw IndexOutOfRange("coalition size must lie in [1, n_agents - 1]");
  }
  RowBuilder rb(req.world, n);
  if (req.n_col == 1) {
    // A lone colluder is just a unilateral deviator.
    return finish(req, solve_lp(base_truthful_program(req, rb)));
  }
  DisjunctiveProgram program;
  program.base = base_truthful_program(req, rb);
  const auto honest_value = rb.honest_value();
  for (Strategy s : {Strategy::all_pos, Strategy::all_neg, Strategy::lie}) {
    program.groups.push_back(destabilize_block(rb, uniform_block(s, req.n_col),
                                               n - req.n_col, req.mode,
                                               honest_value, req.delta));
  }
  return finish(req, solve_disjunctive(program, req.guard));
}

PaymentScheme design_partial_asymmetric(const DesignRequest& req) {
  require_world_and_margin(req);
  const int n = req.n_agents;
  if (req.n_col < 1 || req.n_col >= n) {
    throw IndexOutOfRange("coalition size must lie in [1, n_agents - 1]");
  }
  return design_figure_family(req, req.n_col, req.mode);
}

PaymentScheme design_dominant(const DesignRequest& req) {
  require_world_and_margin(req);
  require_agents(req, 2);
  const int n = req.n_agents;
  if (req.n_col < 1 || req.n_col >= n) {
    throw IndexOutOfRange("coalition size must lie in [1, n_agents - 1]");
  }
  RowBuilder rb(req.world, n);
  if (req.n_col == 1) {
    // A lone insider faces exactly the plain truthful program.
    return finish(req, solve_lp(base_truthful_program(req, rb)));
  }
  // The honest outsiders only hold up their end if the plain truthful rows
  // hold for them too, so start from that program rather than from scratch.
  LinearProgram lp = base_truthful_program(req, rb);
  // Whatever c of the other insiders report high, truth beats the flip by
  // margin against the honest outsiders.
  const int outsiders = n - req.n_col;
  for (int c = 0; c < req.n_col; ++c) {
    for (int obs = 0; obs < 2; ++obs) {
      const auto dist = reference_given_observation(req.world, obs, outsiders);
      auto row = rb.zeros();
      for (int m = 0; m <= outsiders; ++m) {
        if (dist[m] == 0) continue;
        row[rb.idx(obs, m + c)] += dist[m];
        row[rb.idx(1 - obs, m + c)] -= dist[m];
      }
      lp.rows.push_back(ge_row(std::move(row), req.margin));
    }
  }
  return finish(req, solve_lp(lp));
}

PaymentScheme design_dominant_unique(const DesignRequest& req) {
  require_world_and_margin(req);
  require_agents(req, 2);
  const int n = req.n_agents;
  if (req.n_col < 1 || req.n_col >= n) {
    throw IndexOutOfRange("coalition size must lie in [1, n_agents - 1]");
  }
  RowBuilder rb(req.world, n);
  if (req.n_col == 1) {
    return finish(req, solve_lp(base_truthful_program(req, rb)));
  }
  DisjunctiveProgram program;
  program.base = base_truthful_program(req, rb);
  const int outsiders = n - req.n_col;
  for (int c = 0; c < req.n_col; ++c) {
    for (int obs = 0; obs < 2; ++obs) {
      const auto dist = reference_given_observation(req.world, obs, outsiders);
      auto row = rb.zeros();
      for (int m = 0; m <= outsiders; ++m) {
        if (dist[m] == 0) continue;
        row[rb.idx(obs, m + c)] += dist[m];
        row[rb.idx(1 - obs, m + c)] -= dist[m];
      }
      program.base.rows.push_back(ge_row(std::move(row), req.margin));
    }
  }
  const auto honest_value = rb.honest_value();
  for (Strategy s : {Strategy::all_pos, Strategy::all_neg, Strategy::lie}) {
    program.groups.push_back(destabilize_block(rb, uniform_block(s, req.n_col),
                                               outsiders, CollusionMode::unique,
                                               honest_value, req.delta));
  }
  return finish(req, solve_disjunctive(program, req.guard));
}

PaymentScheme design_sybil(const DesignRequest& req) {
  require_world_and_margin(req);
  require_agents(req, 2);
  const int n = req.n_agents;
  if (req.n_col < 1 || req.n_col >= n) {
    throw IndexOutOfRange("coalition size must lie in [1, n_agents - 1]");
  }
  RowBuilder rb(req.world, n);
  LinearProgram lp;
  lp.num_vars = rb.vars();
  lp.objective = rb.objective_row(req.objective);

  const int outsiders = n - req.n_col;
  // Revenue of a block submitting r high reports when it saw c high signals,
  // as a row over the table.
  auto block_value = [&](int c, int r) {
    const auto belief = posterior_given_counts(req.world, c, req.n_col);
    const auto dist = reference_distribution(req.world, belief, outsiders);
    auto row = rb.zeros();
    for (int m = 0; m <= outsiders; ++m) {
      if (dist[m] == 0) continue;
      if (r > 0) row[rb.idx(1, r - 1 + m)] += dist[m] * r;
      if (r < req.n_col) row[rb.idx(0, r + m)] += dist[m] * (req.n_col - r);
    }
    return row;
  };
  for (int c = 0; c <= req.n_col; ++c) {
    const auto truthful = block_value(c, c);
    for (int r = 0; r <= req.n_col; ++r) {
      if (r == c) continue;
      lp.rows.push_back(
          ge_row(minus(truthful, block_value(c, r)), req.margin));
    }
  }
  return finish(req, solve_lp(lp));
}

PaymentScheme closed_form_optimal_ic(const World& w, int n_agents,
                                     const Rat& margin) {
  validate_world(w);
  if (margin < 0) throw MalformedProgram("margin must be nonnegative");
  if (n_agents < 2) {
    throw TooFewAgents("a truthful scheme needs at least 2 agents");
  }
  const int m = n_agents - 1;
  const auto low = reference_given_observation(w, 0, m);
  const auto high = reference_given_observation(w, 1, m);
  const Rat d = det2(high[m], high[0], low[m], low[0]);
  if (d <= 0) {
    throw DegenerateWorld(
        "agreement likelihoods do not favor matching reports");
  }
  PaymentScheme s;
  s.n_agents = n_agents;
  s.pay0.assign(n_agents, Rat(0));
  s.pay1.assign(n_agents, Rat(0));
  s.pay0[0] = margin * (low[m] + high[m]) / d;
  s.pay1[m] = margin * (low[0] + high[0]) / d;
  s.lambda = margin;
  s.scenario = scenario_name(Scenario::optimal_ic);
  s.world = world_digest(w);
  return s;
}

PaymentScheme closed_form_unique_symmetric(const World& w, int n_agents,
                                           const Rat& margin,
                                           const Rat& epsilon) {
  validate_world(w);
  if (margin <= 0 || epsilon <= 0 || epsilon >= margin) {
    throw MalformedProgram("need 0 < epsilon < margin");
  }
  if (n_agents < 4) {
    throw TooFewAgents("the unique-equilibrium support needs 4 agents");
  }
  const int m = n_agents - 1;
  const auto low = reference_given_observation(w, 0, m);
  const auto high = reference_given_observation(w, 1, m);

  // With the support pinned to tau(0,N-1) = tau(1,0) = eps and the free pair
  // x = tau(0,1), y = tau(1,N-2), four halfplanes shape the program: both
  // truthful gains clear the margin, and at least one signal makes leaving
  // the all-lie profile worthwhile.  The optimum sits where two of them
  // bind, so enumerate every such vertex, keep the feasible ones, and take
  // the cheapest.
  const Rat ic1_rhs = margin - epsilon * (high[0] - high[m]);
  const Rat ic0_rhs = margin - epsilon * (low[m] - low[0]);
  const Rat esc0_rhs = epsilon * (low[m] - low[0]);
  const Rat esc1_rhs = epsilon * (high[0] - high[m]);

  auto truthful_gain_high = [&](const Rat& x, const Rat& y) {
    return high[m - 1] * y - high[1] * x + epsilon * (high[0] - high[m]);
  };
  auto truthful_gain_low = [&](const Rat& x, const Rat& y) {
    return low[1] * x - low[m - 1] * y + epsilon * (low[m] - low[0]);
  };
  // Gain from reporting truthfully while everyone else keeps lying.
  auto escape_gain_low = [&](const Rat& x, const Rat& y) {
    return low[m - 1] * x - low[1] * y + epsilon * (low[0] - low[m]);
  };
  auto escape_gain_high = [&](const Rat& x, const Rat& y) {
    return high[1] * y - high[m - 1] * x + epsilon * (high[m] - high[0]);
  };

  auto make_scheme = [&](const Rat& x, const Rat& y) {
    PaymentScheme s;
    s.n_agents = n_agents;
    s.pay0.assign(n_agents, Rat(0));
    s.pay1.assign(n_agents, Rat(0));
    s.pay0[1] = x;
    s.pay1[m - 1] = y;
    s.pay0[m] = epsilon;
    s.pay1[0] = epsilon;
    s.lambda = margin;
    s.epsilon = epsilon;
    s.scenario = scenario_name(Scenario::unique_symmetric);
    s.world = world_digest(w);
    return s;
  };

  struct Candidate {
    Rat x, y, cost;
    bool escapes_low, escapes_high;
  };
  std::vector<Candidate> found;
  auto consider = [&](const Rat& a11, const Rat& a12, const Rat& b1,
                      const Rat& a21, const Rat& a22, const Rat& b2) {
    Rat x, y;
    try {
      std::tie(x, y) = solve2(a11, a12, b1, a21, a22, b2);
    } catch (const DegenerateWorld&) {
      return;  // parallel pair, no vertex here
    }
    if (x < 0 || y < 0) return;
    if (truthful_gain_high(x, y) < margin) return;
    if (truthful_gain_low(x, y) < margin) return;
    const Rat esc_low = escape_gain_low(x, y);
    const Rat esc_high = escape_gain_high(x, y);
    if (esc_low < 0 && esc_high < 0) return;
    found.push_back({x, y, honest_expected_value(make_scheme(x, y), w),
                     esc_low >= 0, esc_high >= 0});
  };
  // Both truthful gains tight.
  consider(-high[1], high[m - 1], ic1_rhs, low[1], -low[m - 1], ic0_rhs);
  // One truthful gain tight against one escape gain held at zero.
  consider(-high[1], high[m - 1], ic1_rhs, low[m - 1], -low[1], esc0_rhs);
  consider(low[1], -low[m - 1], ic0_rhs, low[m - 1], -low[1], esc0_rhs);
  consider(-high[1], high[m - 1], ic1_rhs, -high[m - 1], high[1], esc1_rhs);
  consider(low[1], -low[m - 1], ic0_rhs, -high[m - 1], high[1], esc1_rhs);

  // Cheapest vertex per escape region; the search-based solver tries the
  // low-signal escape first, so that region wins cost ties.
  const Candidate* best_low = nullptr;
  const Candidate* best_high = nullptr;
  for (const auto& c : found) {
    if (c.escapes_low && (!best_low || c.cost < best_low->cost)) best_low = &c;
    if (c.escapes_high && (!best_high || c.cost < best_high->cost)) {
      best_high = &c;
    }
  }
  const Candidate* best = best_low;
  if (!best || (best_high && best_high->cost < best->cost)) best = best_high;
  if (!best) {
    throw DegenerateWorld("no vertex satisfies the pinned-support program");
  }
  return make_scheme(best->x, best->y);
}

PaymentScheme closed_form_sybil(const World& w, int n_agents,
                                const Rat& margin, ScoringRule rule) {
  validate_world(w);
  if (margin <= 0) throw MalformedProgram("margin must be positive");
  if (n_agents < 2) {
    throw TooFewAgents("a sybil-proof scheme needs at least 2 agents");
  }
  const int k = n_agents - 1;  // block size; one outsider remains

  // Predicted chance the outsider reports high, given c high signals in the
  // block.  Strict monotonicity in c is what makes the rule score truthful
  // counts strictly best.
  std::vector<Rat> p_high(n_agents);
  for (int c = 0; c <= k; ++c) {
    const auto belief = posterior_given_counts(w, c, k);
    Rat p = 0;
    for (std::size_t t = 0; t < w.types.size(); ++t) {
      p += belief[t] * w.high_prob[t];
    }
    p_high[c] = p;
  }
  for (int c = 0; c + 1 <= k; ++c) {
    if (p_high[c + 1] <= p_high[c]) {
      throw DegenerateWorld(
          "outsider prediction is not strictly increasing in high count");
    }
  }

  // Score of the count-c prediction when the outsider reports i.
  auto score = [&](int i, int c) -> Rat {
    const Rat& p = p_high[c];
    if (rule == ScoringRule::quadratic) {
      return 2 * (i == 1 ? p : 1 - p) - p * p - (1 - p) * (1 - p);
    }
    return Rat(std::log(to_double(i == 1 ? p : 1 - p)));
  };

  // Triangular solve making the block's summed payment at r high reports
  // equal the scoring-rule payoff of prediction r: pay1 entries walk down
  // from the all-high cell, pay0 entries walk up from the all-low cell.
  std::vector<Rat> pay0(n_agents, Rat(0)), pay1(n_agents, Rat(0));
  pay0[0] = score(0, 0) / k;
  pay1[n_agents - 1] = score(1, k) / k;
  for (int x = 0; x <= k - 1; ++x) {
    pay1[x] = ((k - x) * score(0, x + 1) - (k - 1 - x) * score(1, x)) / k;
    pay0[x + 1] = ((x + 1) * score(1, x) - x * score(0, x + 1)) / k;
  }

  // Block revenue when reporting r high after seeing c high signals.
  auto revenue = [&](int r, int c) {
    const auto belief = posterior_given_counts(w, c, k);
    const auto dist = reference_distribution(w, belief, 1);
    Rat v = 0;
    for (int m = 0; m <= 1; ++m) {
      if (r > 0) v += dist[m] * r * pay1[r - 1 + m];
      if (r < k) v += dist[m] * (k - r) * pay0[r + m];
    }
    return v;
  };
  Rat min_gap;
  bool first = true;
  for (int c = 0; c <= k; ++c) {
    const Rat truthful = revenue(c, c);
    for (int r = 0; r <= k; ++r) {
      if (r == c) continue;
      const Rat gap = truthful - revenue(r, c);
      if (first || gap < min_gap) min_gap = gap;
      first = false;
    }
  }
  if (min_gap <= 0) {
    throw DegenerateWorld("scoring construction lost strictness");
  }

  // Scale the gap up to the margin, then shift so the smallest cell is zero.
  const Rat scale = margin / min_gap;
  for (int i = 0; i < n_agents; ++i) {
    pay0[i] *= scale;
    pay1[i] *= scale;
  }
  Rat lowest = pay0[0];
  for (int i = 0; i < n_agents; ++i) {
    if (pay0[i] < lowest) lowest = pay0[i];
    if (pay1[i] < lowest) lowest = pay1[i];
  }
  for (int i = 0; i < n_agents; ++i) {
    pay0[i] -= lowest;
    pay1[i] -= lowest;
  }

  PaymentScheme s;
  s.n_agents = n_agents;
  s.pay0 = std::move(pay0);
  s.pay1 = std::move(pay1);
  s.lambda = margin;
  s.scenario = scenario_name(Scenario::sybil);
  s.world = world_digest(w);
  return s;
}

int max_coalition(const World& w, int n_agents, const Rat& margin,
                  Scenario scenario) {
  if (scenario != Scenario::dominant && scenario != Scenario::sybil) {
    throw MalformedProgram(
        "max_coalition applies to the dominant and sybil scenarios");
  }
  DesignRequest req;
  req.world = w;
  req.n_agents = n_agents;
  req.scenario = scenario;
  req.margin = margin;
  const int ceiling =
      scenario == Scenario::dominant ? n_agents / 2 : n_agents - 1;
  for (int k = ceiling; k >= 1; --k) {
    req.n_col = k;
    try {
      design(req);
      return k;
    } catch (const Infeasible&) {
      continue;
    }
  }
  return 0;
}

}  // namespace peerpay
