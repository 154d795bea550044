#pragma once

#include <peerpay/rational.hpp>

#include <string>
#include <vector>

namespace peerpay {

// Two-signal environment: a latent type with a prior, and per type the
// probability that an agent observes the high signal.  All agents draw
// conditionally independent observations given the type.
struct World {
  std::vector<std::string> types;
  std::vector<Rat> prior;
  std::vector<Rat> high_prob;

  std::size_t num_types() const { return types.size(); }
};

// Checks shape, strictly positive prior summing to exactly 1, conditionals in
// [0, 1] and pairwise distinct, and both signals having positive probability.
void validate_world(const World& w);

// True when every conditional lies strictly inside (0, 1).
bool interior_world(const World& w);

World world_from_json(const std::string& text);
std::string world_to_json(const World& w);

// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
std::string world_digest(const World& w);

// {Pr[low], Pr[high]} marginals of one observation.
std::vector<Rat> signal_prior(const World& w);

// Pr[type | one agent observed obs].
std::vector<Rat> posterior(const World& w, int obs);

// Pr[type | c high signals among m observations].
std::vector<Rat> posterior_given_counts(const World& w, int c, int m);

// Binomial(m, p) probability masses, indices 0..m.
std::vector<Rat> binomial_row(const Rat& p, int m);

// Distribution of the number of high signals among m agents drawing fresh
// observations, under the supplied belief over types: a mixture of
// Binomial(m, high_prob[t]) rows.
std::vector<Rat> reference_distribution(const World& w,
                                        const std::vector<Rat>& belief, int m);

// reference_distribution under posterior(w, obs): what one agent expects of
// m honest peers after observing obs.
std::vector<Rat> reference_given_observation(const World& w, int obs, int m);

struct RatioCheck {
  bool ok = true;
  // Smallest n whose consecutive ratio fails to increase strictly; -1 if ok.
  int first_violation = -1;
};

// Strict monotonicity of n -> Pr[n|1]/Pr[n|0] over the m-agent reference
// distributions, compared by cross-multiplication so zero masses are handled
// exactly.  Worlds with a single type fail at index 0: both rows coincide.
RatioCheck likelihood_ratio_check(const World& w, int m);

}  // namespace peerpay
