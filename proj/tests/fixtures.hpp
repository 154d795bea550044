#pragma once

#include <peerpay/beliefs.hpp>
#include <peerpay/mechanism.hpp>

#include <string>

namespace peerpay::testing {

// Running example: a plumber is competent with prior 4/5; competent work
// satisfies a customer with probability 9/10, incompetent with 3/20.
inline World make_plumber() {
  World w;
  w.types = {"good", "bad"};
  w.prior = {Rat(4, 5), Rat(1, 5)};
  w.high_prob = {Rat(9, 10), Rat(3, 20)};
  return w;
}

inline Rat dec(const std::string& text) { return parse_rational(text); }

// The two-agent incentive-compatible optimum for the plumber world at unit
// margin: tau(0,0) = 21/8, tau(1,1) = 37/24.
inline PaymentScheme make_plumber_pair_scheme() {
  PaymentScheme s;
  s.n_agents = 2;
  s.pay0 = {Rat(21, 8), Rat(0)};
  s.pay1 = {Rat(0), Rat(37, 24)};
  return s;
}

}  // namespace peerpay::testing
