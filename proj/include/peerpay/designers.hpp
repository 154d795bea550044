#pragma once

#include <peerpay/lp_engine.hpp>
#include <peerpay/mechanism.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace peerpay {

// optimal_ic: cheapest truthful-equilibrium scheme.
// unique_symmetric: honesty the only symmetric pure equilibrium.
// pareto_symmetric: honesty weakly better than any symmetric lying
//   equilibrium, enforced through payment caps and a destabilization choice.
// full_asymmetric_pareto: sparse two-payment family whose only equilibria are
//   honest and the two constant profiles, both worth only the small payment.
// partial_symmetric / partial_asymmetric: the same ideas against coalitions
//   of up to n_col insiders, remaining agents honest.
// dominant: honesty optimal whatever up to n_col-1 fellow insiders report.
// sybil: coordinated blocks of n_col reports maximize revenue by honesty.
enum class Scenario {
  optimal_ic,
  unique_symmetric,
  pareto_symmetric,
  full_asymmetric_pareto,
  partial_symmetric,
  partial_asymmetric,
  dominant,
  sybil,
};

const char* scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

// unique: lying profiles must not be equilibria.  pareto: they may survive if
// they pay some member less than honest play.
enum class CollusionMode { unique, pareto };

enum class ScoringRule { quadratic, logarithmic };

struct DesignRequest {
  World world;
  int n_agents = 0;
  Scenario scenario = Scenario::optimal_ic;
  int n_col = 1;                // coalition scenarios only
  CollusionMode mode = CollusionMode::unique;
  Rat margin = 1;               // required truth-telling gap
  std::optional<Rat> epsilon;   // small-payment gap, defaults to margin/1000
  Rat delta = 0;                // closure gap for destabilization rows
  Objective objective = Objective::per_report;
  bool full_table = false;      // partial_asymmetric: forbid every profile
  std::uint64_t guard = 1000000;
};

PaymentScheme design(const DesignRequest& req);

PaymentScheme design_optimal_ic(const DesignRequest& req);
PaymentScheme design_unique_symmetric(const DesignRequest& req);
PaymentScheme design_pareto_symmetric(const DesignRequest& req);
PaymentScheme design_full_asymmetric_pareto(const DesignRequest& req);
PaymentScheme design_partial_symmetric(const DesignRequest& req);
PaymentScheme design_partial_asymmetric(const DesignRequest& req);
PaymentScheme design_dominant(const DesignRequest& req);
// Dominance rows stacked on the unique-mode coalition program, so the
// feasible set sits inside design_partial_symmetric's and cost comparisons
// across the three guarantees are ordered by construction.
PaymentScheme design_dominant_unique(const DesignRequest& req);
PaymentScheme design_sybil(const DesignRequest& req);

// Two-payment solution of the plain truthful program: only tau(0,0) and
// tau(1,N-1) are paid.  Throws DegenerateWorld when the likelihood-ratio
// denominator is not positive.
PaymentScheme closed_form_optimal_ic(const World& w, int n_agents,
                                     const Rat& margin);

// Vertex solution of the unique-equilibrium program on its pinned support:
// pays tau(0,1), tau(1,N-2), and the two small extreme payments.  Enumerates
// every vertex of the constraint system, keeps the feasible ones, and returns
// the cheapest, breaking ties the way the search-based solver does.  Exactly
// matches the unique_symmetric solver whenever the solver's optimum lives on
// this support.
PaymentScheme closed_form_unique_symmetric(const World& w, int n_agents,
                                           const Rat& margin,
                                           const Rat& epsilon);

// Fully sybil-proof construction from a strictly proper scoring rule scored
// against the one remaining outsider, scaled so every report gap is at least
// margin and the smallest payment is zero.  The quadratic rule is exact; the
// logarithmic rule evaluates in floating point before rescaling, good to
// about 1e-9 relative.
PaymentScheme closed_form_sybil(const World& w, int n_agents,
                                const Rat& margin, ScoringRule rule);

// Largest coalition size the scenario (dominant or sybil) can protect
// against, scanning downward from the scenario's ceiling; 0 if none.
int max_coalition(const World& w, int n_agents, const Rat& margin,
                  Scenario scenario);

}  // namespace peerpay
