#pragma once

#include <peerpay/beliefs.hpp>
#include <peerpay/designers.hpp>
#include <peerpay/rng.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace peerpay {

// Seeded experiment description.  An identical config yields byte-identical
// tables, whatever the worker count; workers therefore stay out of the
// emitted metadata.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int samples = 200;
  std::vector<int> agent_counts = {5, 10};
  Rat margin = 1;
  int precision = 6;  // significant digits for emitted decimals
  int workers = 0;    // 0: read PEERPAY_WORKERS, missing means 1
};

// Random two-signal world: 2..20 types, pairwise-distinct conditionals drawn
// as exact ten-thousandths from [0.01, 0.99], prior normalized from uniform
// integer weights.  Every output passes validate_world.
World generate_problem(SplitMix64& rng);

// Cost of the collusion-resistant scheme divided by the plain truthful
// optimum on the same world, averaged per (N, coalition size) row.  scenario
// must be dominant (coalitions up to N/2) or sybil (up to N - 1); infeasible
// instances are dropped from the mean and counted in their own column.
std::string run_cost_curve(const ExperimentConfig& config, Scenario scenario);

// Empirical distribution of the largest coalition size the dominant scenario
// can protect against, tabulated per N.
std::string run_coalition_bound(const ExperimentConfig& config);

// Per-instance normalized costs of the three coalition designs on shared
// worlds: pareto and unique symmetric-collusion modes plus the dominant
// scheme.  Throws InternalContradiction if any instance breaks the
// pareto <= unique <= dominant cost ordering.
std::string run_concept_comparison(const ExperimentConfig& config);

}  // namespace peerpay
