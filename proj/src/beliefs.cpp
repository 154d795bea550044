#include <peerpay/beliefs.hpp>

#include <peerpay/errors.hpp>

#include <json.hpp>

#include <cstdint>
#include <set>
#include <sstream>

namespace peerpay {

namespace {

using nlohmann::json;

Rat json_number(const json& v, const char* field) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<long long>());
  throw MalformedInput(std::string(field) +
                       ": numeric values must be strings (or plain integers) "
                       "to stay exact");
}

std::vector<Rat> json_number_array(const json& v, const char* field) {
  if (!v.is_array()) {
    throw MalformedInput(std::string(field) + ": expected an array");
  }
  std::vector<Rat> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(json_number(e, field));
  return out;
}

void check_obs(int obs) {
  if (obs != 0 && obs != 1) {
    throw IndexOutOfRange("observation must be 0 or 1, got " +
                          std::to_string(obs));
  }
}

}  // namespace

void validate_world(const World& w) {
  const std::size_t k = w.types.size();
  if (k == 0) throw DimensionMismatch("world has no types");
  if (w.prior.size() != k || w.high_prob.size() != k) {
    throw DimensionMismatch("types, prior, and high_prob must have equal length");
  }
  std::set<std::string> names(w.types.begin(), w.types.end());
  if (names.size() != k) throw MalformedInput("duplicate type names");

  Rat total = 0;
  for (const Rat& p : w.prior) {
    if (p <= 0 || p > 1) {
      throw OutOfRangeProbability("prior masses must lie in (0, 1], got " +
                                  format_exact(p));
    }
    total += p;
  }
  if (total != 1) {
    throw NonNormalizedPrior("prior sums to " + format_exact(total));
  }

  for (const Rat& p : w.high_prob) {
    if (p < 0 || p > 1) {
      throw OutOfRangeProbability("conditionals must lie in [0, 1], got " +
                                  format_exact(p));
    }
  }
  std::set<Rat> distinct(w.high_prob.begin(), w.high_prob.end());
  if (distinct.size() != k) {
    throw DuplicateConditional("types must have pairwise distinct conditionals");
  }

  const auto sig = signal_prior(w);
  if (sig[0] == 0 || sig[1] == 0) {
    throw ZeroProbabilityObservation("both signals need positive probability");
  }
}

bool interior_world(const World& w) {
  for (const Rat& p : w.high_prob) {
    if (p <= 0 || p >= 1) return false;
  }
  return true;
}

World world_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("world JSON: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedInput("world JSON: expected an object");
  for (const char* field : {"types", "prior", "high_prob"}) {
    if (!doc.contains(field)) {
      throw MalformedInput(std::string("world JSON: missing '") + field + "'");
    }
  }
  World w;
  if (!doc["types"].is_array()) throw MalformedInput("types: expected an array");
  for (const auto& t : doc["types"]) {
    if (!t.is_string()) throw MalformedInput("types: entries must be strings");
    w.types.push_back(t.get<std::string>());
  }
  w.prior = json_number_array(doc["prior"], "prior");
  w.high_prob = json_number_array(doc["high_prob"], "high_prob");
  validate_world(w);
  return w;
}

std::string world_to_json(const World& w) {
  json doc;
  doc["types"] = w.types;
  json prior = json::array(), cond = json::array();
  for (const Rat& p : w.prior) prior.push_back(format_exact(p));
  for (const Rat& p : w.high_prob) cond.push_back(format_exact(p));
  doc["prior"] = std::move(prior);
  doc["high_prob"] = std::move(cond);
  return doc.dump(2) + "\n";
}

std::string world_digest(const World& w) {
  const std::string canon = world_to_json(w);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) out << ((h >> shift) & 0xf);
  return out.str();
}

std::vector<Rat> signal_prior(const World& w) {
  Rat high = 0;
  for (std::size_t t = 0; t < w.num_types(); ++t) {
    high += w.prior[t] * w.high_prob[t];
  }
  return {1 - high, high};
}

std::vector<Rat> posterior(const World& w, int obs) {
  check_obs(obs);
  std::vector<Rat> out(w.num_types());
  Rat total = 0;
  for (std::size_t t = 0; t < w.num_types(); ++t) {
    const Rat like = obs == 1 ? w.high_prob[t] : Rat(1 - w.high_prob[t]);
    out[t] = w.prior[t] * like;
    total += out[t];
  }
  if (total == 0) {
    throw ZeroProbabilityObservation("observation " + std::to_string(obs) +
                                     " has probability zero");
  }
  for (Rat& v : out) v /= total;
  return out;
}

std::vector<Rat> posterior_given_counts(const World& w, int c, int m) {
  if (m < 0) throw IndexOutOfRange("negative sample count");
  if (c < 0 || c > m) {
    throw IndexOutOfRange("high count " + std::to_string(c) +
                          " outside 0.." + std::to_string(m));
  }
  std::vector<Rat> out(w.num_types());
  Rat total = 0;
  for (std::size_t t = 0; t < w.num_types(); ++t) {
    Rat like = 1;
    for (int i = 0; i < c; ++i) like *= w.high_prob[t];
    for (int i = 0; i < m - c; ++i) like *= 1 - w.high_prob[t];
    out[t] = w.prior[t] * like;
    total += out[t];
  }
  if (total == 0) {
    throw ZeroProbabilityObservation("count " + std::to_string(c) + " of " +
                                     std::to_string(m) +
                                     " has probability zero");
  }
  for (Rat& v : out) v /= total;
  return out;
}

std::vector<Rat> binomial_row(const Rat& p, int m) {
  if (m < 0) throw IndexOutOfRange("negative sample count");
  std::vector<Rat> out(static_cast<std::size_t>(m) + 1);
  // Running binomial coefficient; exact in big integers.
  BigInt comb = 1;
  std::vector<Rat> ppow(static_cast<std::size_t>(m) + 1),
      qpow(static_cast<std::size_t>(m) + 1);
  ppow[0] = 1;
  qpow[0] = 1;
  const Rat q = 1 - p;
  for (int i = 1; i <= m; ++i) {
    ppow[i] = ppow[i - 1] * p;
    qpow[i] = qpow[i - 1] * q;
  }
  for (int n = 0; n <= m; ++n) {
    if (n > 0) {
      comb = comb * (m - n + 1) / n;
    }
    out[n] = Rat(comb) * ppow[n] * qpow[m - n];
  }
  return out;
}

std::vector<Rat> reference_distribution(const World& w,
                                        const std::vector<Rat>& belief, int m) {
  if (belief.size() != w.num_types()) {
    throw DimensionMismatch("belief length does not match type count");
  }
  Rat total = 0;
  for (const Rat& b : belief) {
    if (b < 0 || b > 1) {
      throw OutOfRangeProbability("belief masses must lie in [0, 1]");
    }
    total += b;
  }
  if (total != 1) throw NonNormalizedPrior("belief sums to " + format_exact(total));

  std::vector<Rat> out(static_cast<std::size_t>(m) + 1, Rat(0));
  for (std::size_t t = 0; t < w.num_types(); ++t) {
    if (belief[t] == 0) continue;
    const auto row = binomial_row(w.high_prob[t], m);
    for (int n = 0; n <= m; ++n) out[n] += belief[t] * row[n];
  }
  return out;
}

std::vector<Rat> reference_given_observation(const World& w, int obs, int m) {
  return reference_distribution(w, posterior(w, obs), m);
}

RatioCheck likelihood_ratio_check(const World& w, int m) {
  if (m < 1) throw IndexOutOfRange("need at least one reference report");
  if (w.num_types() < 2) return {false, 0};
  const auto low = reference_given_observation(w, 0, m);
  const auto high = reference_given_observation(w, 1, m);
  for (int n = 0; n + 1 <= m; ++n) {
    // high[n+1]/low[n+1] > high[n]/low[n], cross-multiplied.
    if (high[n + 1] * low[n] <= high[n] * low[n + 1]) {
      return {false, n};
    }
  }
  return {true, -1};
}

}  // namespace peerpay
