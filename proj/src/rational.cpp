#include <peerpay/rational.hpp>

#include <peerpay/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cstddef>

namespace peerpay {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

BigInt pow10(long k) {
  return boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(k));
}

// cpp_int's string constructor reads a leading zero as an octal prefix.
BigInt from_digits(const std::string& d) {
  std::size_t i = 0;
  while (i + 1 < d.size() && d[i] == '0') ++i;
  return BigInt(d.substr(i));
}

}  // namespace

Rat parse_rational(const std::string& text) {
  auto fail = [&text]() -> Rat {
    throw MalformedInput("not a number: '" + text + "'");
  };

  std::size_t lo = 0, hi = text.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(text[hi - 1]))) --hi;
  if (lo >= hi) return fail();
  const std::string s = text.substr(lo, hi - lo);

  std::size_t p = 0;
  bool neg = false;
  if (s[p] == '+' || s[p] == '-') {
    neg = s[p] == '-';
    ++p;
  }

  if (auto slash = s.find('/'); slash != std::string::npos) {
    const std::string num = s.substr(p, slash - p);
    const std::string den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return fail();
    BigInt d = from_digits(den);
    if (d == 0) return fail();
    Rat r(from_digits(num), d);
    return neg ? Rat(-r) : r;
  }

  std::string digits;
  long frac_len = 0;
  bool any = false;
  while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
    digits += s[p++];
    any = true;
  }
  if (p < s.size() && s[p] == '.') {
    ++p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
      digits += s[p++];
      ++frac_len;
      any = true;
    }
  }
  if (!any) return fail();

  long expo = 0;
  if (p < s.size() && (s[p] == 'e' || s[p] == 'E')) {
    ++p;
    bool eneg = false;
    if (p < s.size() && (s[p] == '+' || s[p] == '-')) {
      eneg = s[p] == '-';
      ++p;
    }
    bool eany = false;
    long ev = 0;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
      ev = ev * 10 + (s[p] - '0');
      if (ev > 1000000) return fail();
      ++p;
      eany = true;
    }
    if (!eany) return fail();
    expo = eneg ? -ev : ev;
  }
  if (p != s.size()) return fail();

  Rat r{from_digits(digits)};
  if (const long net = expo - frac_len; net > 0) {
    r *= pow10(net);
  } else if (net < 0) {
    r /= pow10(-net);
  }
  return neg ? Rat(-r) : r;
}

std::string format_exact(const Rat& value) {
  BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  const bool neg = num < 0;
  if (neg) num = -num;

  BigInt leftover = den;
  long twos = 0, fives = 0;
  while (leftover % 2 == 0) {
    leftover /= 2;
    ++twos;
  }
  while (leftover % 5 == 0) {
    leftover /= 5;
    ++fives;
  }
  if (leftover != 1) {
    return (neg ? "-" : "") + num.str() + "/" + den.str();
  }

  const long places = std::max(twos, fives);
  if (places == 0) return (neg ? "-" : "") + num.str();

  // num * 10^places / den is an integer by construction.
  std::string s = BigInt(num * pow10(places) / den).str();
  if (static_cast<long>(s.size()) <= places) {
    s.insert(0, static_cast<std::size_t>(places) - s.size() + 1, '0');
  }
  std::string intpart = s.substr(0, s.size() - places);
  std::string fracpart = s.substr(s.size() - places);
  while (!fracpart.empty() && fracpart.back() == '0') fracpart.pop_back();
  std::string out = neg ? "-" : "";
  out += intpart;
  if (!fracpart.empty()) {
    out += '.';
    out += fracpart;
  }
  return out;
}

std::string format_sig(const Rat& value, int digits) {
  if (digits < 1) throw MalformedInput("significant digits must be >= 1");
  if (value == 0) return "0";

  const bool neg = value < 0;
  const Rat mag = neg ? Rat(-value) : value;

  // Decimal exponent e with 10^e <= mag < 10^(e+1), found from digit counts
  // and corrected by exact comparison.
  const long nd = static_cast<long>(
      boost::multiprecision::numerator(mag).str().size());
  const long dd = static_cast<long>(
      boost::multiprecision::denominator(mag).str().size());
  long e = nd - dd;
  auto pow10r = [](long k) {
    Rat r(pow10(k < 0 ? -k : k));
    return k < 0 ? Rat(1 / r) : r;
  };
  while (mag >= pow10r(e + 1)) ++e;
  while (mag < pow10r(e)) --e;

  // Scale into [10^(digits-1), 10^digits) and round half away from zero.
  const Rat scaled = mag * pow10r(digits - 1 - e);
  BigInt mant = BigInt(boost::multiprecision::numerator(scaled) * 2 +
                       boost::multiprecision::denominator(scaled)) /
                BigInt(boost::multiprecision::denominator(scaled) * 2);
  if (mant == pow10(digits)) {
    mant /= 10;
    ++e;
  }

  std::string m = mant.str();
  std::string out = neg ? "-" : "";
  if (e >= -4 && e < digits) {
    if (e >= 0) {
      std::string intpart = m.substr(0, static_cast<std::size_t>(e) + 1);
      std::string fracpart = m.substr(static_cast<std::size_t>(e) + 1);
      while (!fracpart.empty() && fracpart.back() == '0') fracpart.pop_back();
      out += intpart;
      if (!fracpart.empty()) out += "." + fracpart;
    } else {
      while (!m.empty() && m.back() == '0') m.pop_back();
      out += "0.";
      out.append(static_cast<std::size_t>(-e) - 1, '0');
      out += m;
    }
  } else {
    std::string fracpart = m.substr(1);
    while (!fracpart.empty() && fracpart.back() == '0') fracpart.pop_back();
    out += m.substr(0, 1);
    if (!fracpart.empty()) out += "." + fracpart;
    out += "e" + std::to_string(e);
  }
  return out;
}

double to_double(const Rat& value) { return value.convert_to<double>(); }

}  // namespace peerpay
