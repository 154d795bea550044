#pragma once

#include <peerpay/beliefs.hpp>
#include <peerpay/rational.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace peerpay {

// Pure reporting strategies: honest mirrors the observation, lie inverts it,
// all_pos and all_neg ignore it.
enum class Strategy { honest, lie, all_pos, all_neg };

inline constexpr std::array<Strategy, 4> kStrategies{
    Strategy::all_neg, Strategy::all_pos, Strategy::honest, Strategy::lie};

int strategy_report(Strategy s, int obs);
const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// How many agents play each strategy; order matches the canonical expansion
// (all_neg, all_pos, honest, lie).
struct ProfileCounts {
  int n_neg = 0;
  int n_pos = 0;
  int n_honest = 0;
  int n_lie = 0;

  int total() const { return n_neg + n_pos + n_honest + n_lie; }
  int count(Strategy s) const;
  ProfileCounts minus_one(Strategy s) const;
  bool operator==(const ProfileCounts&) const = default;
};

std::string profile_name(const ProfileCounts& p);

// Payment table tau(report, n): what an agent earns for reporting `report`
// when n of the other n_agents-1 reports are high.  Rows are indexed by the
// report, columns by n in 0..n_agents-1.
struct PaymentScheme {
  int n_agents = 0;
  std::vector<Rat> pay0;
  std::vector<Rat> pay1;
  std::optional<Rat> lambda;
  std::optional<Rat> epsilon;
  std::string scenario;  // designer that produced it, empty for hand-built
  std::string world;     // digest of the design world, empty for hand-built

  const Rat& pay(int report, int n) const;
};

// Shape check: two rows of length n_agents, n_agents >= 2, payments >= 0.
void validate_scheme(const PaymentScheme& s);

PaymentScheme scheme_from_json(const std::string& text);
std::string scheme_to_json(const PaymentScheme& s);

// Distribution of the number of high reports among `others`, as predicted by
// an agent who observed obs.  Exact: per type the honest/liar blocks are
// independent binomials, convolved, then the constant reporters shift the
// count; the mixture is taken under the posterior.
std::vector<Rat> report_count_distribution(const World& w, int obs,
                                           const ProfileCounts& others);

// Expected payment for playing `mine` after observing obs, against `others`
// (which must cover the full remaining population).
Rat expected_payoff(const PaymentScheme& s, const World& w, Strategy mine,
                    const ProfileCounts& others, int obs);

// Ex-ante value of one agent when everyone reports honestly.
Rat honest_expected_value(const PaymentScheme& s, const World& w);

// Ex-ante value of one agent when everyone inverts their observation.
Rat lying_profile_value(const PaymentScheme& s, const World& w);

// Total expected payment to a coordinated block of n_col agents that observed
// c high signals and reports r high, with the remaining agents honest.  The
// block's belief over types conditions on all c of its observations.
Rat coalition_revenue(const PaymentScheme& s, const World& w, int n_col, int c,
                      int r);

enum class Objective { per_report, total_budget };

// per_report: honest_expected_value.  total_budget: expected sum of all
// n_agents payments under honest reporting.
Rat scheme_cost(const PaymentScheme& s, const World& w, Objective objective);

}  // namespace peerpay
