#pragma once

#include <peerpay/mechanism.hpp>

#include <optional>
#include <vector>

namespace peerpay {

struct DeviationWitness {
  Strategy strategy;    // the group with a profitable deviation
  int observation = 0;  // the signal at which it pays off
  int better_report = 0;
  Rat gain = 0;  // strictly positive
};

struct GroupValue {
  Strategy strategy;
  Rat value = 0;  // ex-ante expected payment per member
};

struct EquilibriumReport {
  ProfileCounts profile;
  // Weak reading: no member has a strictly profitable report change.  Strict
  // reading: every member strictly prefers its current report at both
  // signals.  margin is the smallest stay-minus-flip difference over present
  // groups and observations.
  bool is_ne = false;
  bool is_strict_ne = false;
  Rat margin = 0;
  std::optional<DeviationWitness> witness;  // set when not a weak equilibrium
  std::vector<GroupValue> values;           // present groups, canonical order
};

// Full interim analysis of one strategy-count profile.
EquilibriumReport analyze_profile(const PaymentScheme& s, const World& w,
                                  const ProfileCounts& profile);

bool is_nash(const PaymentScheme& s, const World& w,
             const ProfileCounts& profile);

struct BestResponse {
  int report = 0;
  bool strict = false;  // false on ties, which return the low report
};

BestResponse best_response(const PaymentScheme& s, const World& w,
                           const ProfileCounts& others, int obs);

// Reports for every strategy-count profile, lexicographic in
// (n_neg, n_pos, n_honest).  Populations above 20 agents are refused.
std::vector<EquilibriumReport> enumerate_profiles(const PaymentScheme& s,
                                                  const World& w);

// The equilibria among them; strict=true filters by the strict reading.
std::vector<EquilibriumReport> enumerate_pure_equilibria(const PaymentScheme& s,
                                                         const World& w,
                                                         bool strict = false);

struct ParetoComparison {
  // Per-agent ex-ante values under the canonical expansion of each profile.
  std::vector<Rat> a_values;
  std::vector<Rat> b_values;
  bool a_dominates = false;         // strictly better for every agent
  bool b_dominates = false;
  bool a_weakly_dominates = false;  // at least as good for every agent
  bool b_weakly_dominates = false;
};

ParetoComparison pareto_compare(const PaymentScheme& s, const World& w,
                                const ProfileCounts& a, const ProfileCounts& b);

struct DominanceWitness {
  int coalition_high = 0;  // high reports among the member's n_col-1 fellows
  int observation = 0;
  Rat gap = 0;
};

struct DominanceReport {
  bool ok = false;
  Rat min_gap = 0;
  std::optional<DominanceWitness> witness;  // set when not ok
};

// Honest reporting as a dominant strategy against coalitions: for every
// split of the member's n_col-1 fellow insiders' reports and every own
// signal, truth-telling must beat flipping by a strictly positive gap of at
// least `margin`.  Outsiders are honest.
DominanceReport is_dominant_honest(const PaymentScheme& s, const World& w,
                                   int n_col, const Rat& margin = Rat(0));

struct CoalitionBest {
  int report = 0;  // number of high reports the block submits
  bool strict = false;
};

// argmax over r of coalition_revenue for a block that observed c highs; ties
// return the smallest maximizer with strict=false.
CoalitionBest coalition_best_report(const PaymentScheme& s, const World& w,
                                    int n_col, int c);

}  // namespace peerpay
