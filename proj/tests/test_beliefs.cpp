#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <peerpay/beliefs.hpp>
#include <peerpay/errors.hpp>

#include "fixtures.hpp"

using namespace peerpay;
using peerpay::testing::dec;
using peerpay::testing::make_plumber;

TEST_CASE("validate_world accepts the running example") {
  CHECK_NOTHROW(validate_world(make_plumber()));
  CHECK(interior_world(make_plumber()));
}

TEST_CASE("validate_world rejects broken inputs") {
  World w = make_plumber();
  w.prior = {Rat(4, 5), Rat(1, 10)};
  CHECK_THROWS_AS(validate_world(w), NonNormalizedPrior);

  w = make_plumber();
  w.prior = {Rat(6, 5), Rat(-1, 5)};
  CHECK_THROWS_AS(validate_world(w), OutOfRangeProbability);

  w = make_plumber();
  w.high_prob = {Rat(9, 10), Rat(11, 10)};
  CHECK_THROWS_AS(validate_world(w), OutOfRangeProbability);

  w = make_plumber();
  w.high_prob = {Rat(9, 10), Rat(9, 10)};
  CHECK_THROWS_AS(validate_world(w), DuplicateConditional);

  w = make_plumber();
  w.prior.pop_back();
  CHECK_THROWS_AS(validate_world(w), DimensionMismatch);

  w = World{};
  CHECK_THROWS_AS(validate_world(w), DimensionMismatch);

  w = World{{"only"}, {Rat(1)}, {Rat(1)}};
  CHECK_THROWS_AS(validate_world(w), ZeroProbabilityObservation);
}

TEST_CASE("signal prior and posteriors match the worked numbers") {
  const World w = make_plumber();
  const auto sig = signal_prior(w);
  CHECK(sig[0] == Rat(1, 4));
  CHECK(sig[1] == Rat(3, 4));

  const auto low = posterior(w, 0);
  CHECK(low[0] == Rat(8, 25));   // 0.32
  CHECK(low[1] == Rat(17, 25));  // 0.68

  const auto high = posterior(w, 1);
  CHECK(high[0] == Rat(24, 25));  // 0.96
  CHECK(high[1] == Rat(1, 25));   // 0.04

  CHECK_THROWS_AS(posterior(w, 2), IndexOutOfRange);
}

TEST_CASE("posterior_given_counts follows the likelihood rule") {
  const World w = make_plumber();
  // Two observations, both low: 0.8 * 0.1^2 vs 0.2 * 0.85^2, normalized.
  const auto p = posterior_given_counts(w, 0, 2);
  CHECK(p[0] == Rat(16, 305));
  CHECK(p[1] == Rat(289, 305));

  // One observation reduces to the single-signal posterior.
  CHECK(posterior_given_counts(w, 0, 1) == posterior(w, 0));
  CHECK(posterior_given_counts(w, 1, 1) == posterior(w, 1));

  // Zero observations reduce to the prior.
  CHECK(posterior_given_counts(w, 0, 0) == w.prior);

  CHECK_THROWS_AS(posterior_given_counts(w, 3, 2), IndexOutOfRange);
  CHECK_THROWS_AS(posterior_given_counts(w, -1, 2), IndexOutOfRange);
}

TEST_CASE("binomial rows are exact and normalized") {
  const auto row = binomial_row(Rat(9, 10), 3);
  CHECK(row[0] == Rat(1, 1000));
  CHECK(row[1] == Rat(27, 1000));
  CHECK(row[2] == Rat(243, 1000));
  CHECK(row[3] == Rat(729, 1000));

  const auto skew = binomial_row(Rat(3, 20), 3);
  CHECK(skew[0] == Rat(4913, 8000));
  CHECK(skew[1] == Rat(2601, 8000));
  CHECK(skew[2] == Rat(459, 8000));
  CHECK(skew[3] == Rat(27, 8000));

  Rat total = 0;
  for (const Rat& v : binomial_row(Rat(7, 13), 9)) total += v;
  CHECK(total == 1);
}

TEST_CASE("reference distributions match the four-agent table") {
  const World w = make_plumber();
  const auto low = reference_given_observation(w, 0, 3);
  CHECK(low[0] == Rat(16717, 40000));  // 0.417925
  CHECK(low[1] == Rat(9189, 40000));   // 0.229725
  CHECK(low[2] == Rat(4671, 40000));   // 0.116775
  CHECK(low[3] == Rat(9423, 40000));   // 0.235575

  const auto high = reference_given_observation(w, 1, 3);
  CHECK(high[0] == Rat(1021, 40000));   // 0.025525
  CHECK(high[1] == Rat(1557, 40000));   // 0.038925
  CHECK(high[2] == Rat(9423, 40000));   // 0.235575
  CHECK(high[3] == Rat(27999, 40000));  // 0.699975

  for (const auto& dist : {low, high}) {
    Rat total = 0;
    for (const Rat& v : dist) total += v;
    CHECK(total == 1);
  }
}

TEST_CASE("two-agent reference probabilities match the pair example") {
  const World w = make_plumber();
  const auto low = reference_given_observation(w, 0, 1);
  const auto high = reference_given_observation(w, 1, 1);
  CHECK(low[1] == Rat(39, 100));
  CHECK(low[0] == Rat(61, 100));
  CHECK(high[1] == Rat(87, 100));
  CHECK(high[0] == Rat(13, 100));
}

TEST_CASE("reference_distribution validates its belief argument") {
  const World w = make_plumber();
  CHECK_THROWS_AS(reference_distribution(w, {Rat(1)}, 2), DimensionMismatch);
  CHECK_THROWS_AS(reference_distribution(w, {Rat(1, 2), Rat(1, 3)}, 2),
                  NonNormalizedPrior);
  CHECK_THROWS_AS(reference_distribution(w, {Rat(3, 2), Rat(-1, 2)}, 2),
                  OutOfRangeProbability);
}

TEST_CASE("likelihood ratios increase strictly for the running example") {
  const World w = make_plumber();
  const auto check = likelihood_ratio_check(w, 3);
  CHECK(check.ok);
  CHECK(check.first_violation == -1);

  const auto low = reference_given_observation(w, 0, 3);
  const auto high = reference_given_observation(w, 1, 3);
  const double expected[] = {0.061, 0.169, 2.017, 2.971};
  for (int n = 0; n <= 3; ++n) {
    CHECK(to_double(high[n] / low[n]) ==
          doctest::Approx(expected[n]).epsilon(0.01));
  }
}

TEST_CASE("single-type worlds fail the ratio check at index zero") {
  World w;
  w.types = {"only"};
  w.prior = {Rat(1)};
  w.high_prob = {Rat(1, 2)};
  const auto check = likelihood_ratio_check(w, 4);
  CHECK_FALSE(check.ok);
  CHECK(check.first_violation == 0);
}

TEST_CASE("world JSON round-trips exactly") {
  const World w = make_plumber();
  const std::string text = world_to_json(w);
  const World back = world_from_json(text);
  CHECK(back.types == w.types);
  CHECK(back.prior == w.prior);
  CHECK(back.high_prob == w.high_prob);

  CHECK_THROWS_AS(world_from_json("{"), MalformedInput);
  CHECK_THROWS_AS(world_from_json("{\"types\":[\"a\"]}"), MalformedInput);
  // Floating JSON literals are rejected to keep values exact.
  CHECK_THROWS_AS(
      world_from_json("{\"types\":[\"a\",\"b\"],\"prior\":[0.8,0.2],"
                      "\"high_prob\":[\"0.9\",\"0.15\"]}"),
      MalformedInput);
}

TEST_CASE("world digests are stable and discriminating") {
  const World w = make_plumber();
  const std::string d1 = world_digest(w);
  CHECK(d1.size() == 16);
  CHECK(d1 == world_digest(world_from_json(world_to_json(w))));

  World other = w;
  other.prior = {Rat(3, 5), Rat(2, 5)};
  CHECK(world_digest(other) != d1);
}
