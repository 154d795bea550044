#include <peerpay/verifier.hpp>

#include <peerpay/errors.hpp>

namespace peerpay {

namespace {

// Expected payment for submitting `report` after observing obs against the
// given others; strategy-independent core of the deviation checks.
Rat report_value(const PaymentScheme& s, const World& w, int report,
                 const ProfileCounts& others, int obs) {
  const auto dist = report_count_distribution(w, obs, others);
  Rat value = 0;
  for (int n = 0; n < s.n_agents; ++n) {
    if (dist[n] != 0) value += dist[n] * s.pay(report, n);
  }
  return value;
}

void check_population(const PaymentScheme& s, const World& w,
                      const ProfileCounts& profile) {
  validate_scheme(s);
  validate_world(w);
  if (profile.total() != s.n_agents) {
    throw DimensionMismatch("profile must cover all " +
                            std::to_string(s.n_agents) + " agents");
  }
}

}  // namespace

EquilibriumReport analyze_profile(const PaymentScheme& s, const World& w,
                                  const ProfileCounts& profile) {
  check_population(s, w, profile);
  const auto sig = signal_prior(w);

  EquilibriumReport report;
  report.profile = profile;
  bool first = true;
  for (Strategy g : kStrategies) {
    if (profile.count(g) == 0) continue;
    const ProfileCounts others = profile.minus_one(g);
    Rat value = 0;
    for (int obs : {0, 1}) {
      const int stay = strategy_report(g, obs);
      const Rat v_stay = report_value(s, w, stay, others, obs);
      const Rat v_flip = report_value(s, w, 1 - stay, others, obs);
      const Rat diff = v_stay - v_flip;
      value += sig[obs] * v_stay;
      if (first || diff < report.margin) report.margin = diff;
      first = false;
      if (diff < 0 && !report.witness) {
        report.witness = DeviationWitness{g, obs, 1 - stay, -diff};
      }
    }
    report.values.push_back(GroupValue{g, value});
  }
  report.is_ne = !report.witness;
  report.is_strict_ne = report.margin > 0;
  return report;
}

bool is_nash(const PaymentScheme& s, const World& w,
             const ProfileCounts& profile) {
  return analyze_profile(s, w, profile).is_ne;
}

BestResponse best_response(const PaymentScheme& s, const World& w,
                           const ProfileCounts& others, int obs) {
  validate_scheme(s);
  if (others.total() != s.n_agents - 1) {
    throw DimensionMismatch("others must cover the remaining " +
                            std::to_string(s.n_agents - 1) + " agents");
  }
  const Rat v0 = report_value(s, w, 0, others, obs);
  const Rat v1 = report_value(s, w, 1, others, obs);
  if (v1 > v0) return {1, true};
  if (v0 > v1) return {0, true};
  return {0, false};
}

std::vector<EquilibriumReport> enumerate_profiles(const PaymentScheme& s,
                                                  const World& w) {
  validate_scheme(s);
  const int n = s.n_agents;
  if (n > 20) {
    throw PopulationTooLarge("profile enumeration is capped at 20 agents");
  }
  std::vector<EquilibriumReport> out;
  for (int neg = 0; neg <= n; ++neg) {
    for (int pos = 0; neg + pos <= n; ++pos) {
      for (int honest = 0; neg + pos + honest <= n; ++honest) {
        const ProfileCounts p{neg, pos, honest, n - neg - pos - honest};
        out.push_back(analyze_profile(s, w, p));
      }
    }
  }
  return out;
}

std::vector<EquilibriumReport> enumerate_pure_equilibria(const PaymentScheme& s,
                                                         const World& w,
                                                         bool strict) {
  std::vector<EquilibriumReport> out;
  for (EquilibriumReport& r : enumerate_profiles(s, w)) {
    if (strict ? r.is_strict_ne : r.is_ne) out.push_back(std::move(r));
  }
  return out;
}

ParetoComparison pareto_compare(const PaymentScheme& s, const World& w,
                                const ProfileCounts& a,
                                const ProfileCounts& b) {
  ParetoComparison cmp;
  for (const auto* profile : {&a, &b}) {
    const EquilibriumReport rep = analyze_profile(s, w, *profile);
    auto& values = profile == &a ? cmp.a_values : cmp.b_values;
    for (const GroupValue& gv : rep.values) {
      for (int i = 0; i < profile->count(gv.strategy); ++i) {
        values.push_back(gv.value);
      }
    }
  }
  if (cmp.a_values.size() != cmp.b_values.size()) {
    throw DimensionMismatch("profiles cover different populations");
  }
  cmp.a_dominates = cmp.b_dominates = true;
  cmp.a_weakly_dominates = cmp.b_weakly_dominates = true;
  for (std::size_t i = 0; i < cmp.a_values.size(); ++i) {
    if (cmp.a_values[i] <= cmp.b_values[i]) cmp.a_dominates = false;
    if (cmp.b_values[i] <= cmp.a_values[i]) cmp.b_dominates = false;
    if (cmp.a_values[i] < cmp.b_values[i]) cmp.a_weakly_dominates = false;
    if (cmp.b_values[i] < cmp.a_values[i]) cmp.b_weakly_dominates = false;
  }
  return cmp;
}

DominanceReport is_dominant_honest(const PaymentScheme& s, const World& w,
                                   int n_col, const Rat& margin) {
  validate_scheme(s);
  validate_world(w);
  if (n_col < 1 || n_col > s.n_agents) {
    throw IndexOutOfRange("coalition size outside 1..n_agents");
  }
  const int outsiders = s.n_agents - n_col;

  DominanceReport report;
  report.ok = true;
  bool first = true;
  for (int c = 0; c < n_col; ++c) {
    for (int obs : {0, 1}) {
      const auto dist = reference_given_observation(w, obs, outsiders);
      Rat gap = 0;
      for (int n = 0; n <= outsiders; ++n) {
        if (dist[n] == 0) continue;
        gap += dist[n] * (s.pay(obs, n + c) - s.pay(1 - obs, n + c));
      }
      if (first || gap < report.min_gap) report.min_gap = gap;
      first = false;
      if ((gap <= 0 || gap < margin) && !report.witness) {
        report.ok = false;
        report.witness = DominanceWitness{c, obs, gap};
      }
    }
  }
  return report;
}

CoalitionBest coalition_best_report(const PaymentScheme& s, const World& w,
                                    int n_col, int c) {
  CoalitionBest best;
  Rat best_value = 0;
  bool tie = false;
  for (int r = 0; r <= n_col; ++r) {
    const Rat value = coalition_revenue(s, w, n_col, c, r);
    if (r == 0 || value > best_value) {
      best.report = r;
      best_value = value;
      tie = false;
    } else if (value == best_value) {
      tie = true;
    }
  }
  best.strict = !tie;
  return best;
}

}  // namespace peerpay
