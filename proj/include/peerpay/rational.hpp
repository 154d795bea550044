#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace peerpay {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Accepts plain integers ("7", "-3"), decimals ("0.25", ".5"), scientific
// notation ("2e-3", "1.5E2"), and fractions ("22/7", "-1/3").  Exact; never
// rounds.  Throws MalformedInput on anything else.
Rat parse_rational(const std::string& text);

// Shortest lossless form: a terminating decimal when the reduced denominator
// is 2^a 5^b, otherwise "p/q".  parse_rational inverts it exactly.
std::string format_exact(const Rat& value);

// Rounded to `digits` significant figures, half away from zero.  Plain
// decimal for exponents in [-4, digits), otherwise d.dddde<exp>.  Output is
// always parseable by strtod and by parse_rational.
std::string format_sig(const Rat& value, int digits = 6);

double to_double(const Rat& value);

}  // namespace peerpay
