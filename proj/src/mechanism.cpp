#include <peerpay/mechanism.hpp>

#include <peerpay/errors.hpp>

#include <json.hpp>

#include <sstream>

namespace peerpay {

namespace {

using nlohmann::json;

Rat json_rat(const json& v, const char* field) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<long long>());
  throw MalformedInput(std::string(field) +
                       ": numeric values must be strings (or plain integers) "
                       "to stay exact");
}

void check_obs(int obs) {
  if (obs != 0 && obs != 1) {
    throw IndexOutOfRange("observation must be 0 or 1, got " +
                          std::to_string(obs));
  }
}

void check_profile(const ProfileCounts& p) {
  if (p.n_neg < 0 || p.n_pos < 0 || p.n_honest < 0 || p.n_lie < 0) {
    throw IndexOutOfRange("negative strategy count in profile");
  }
}

}  // namespace

int strategy_report(Strategy s, int obs) {
  check_obs(obs);
  switch (s) {
    case Strategy::honest:
      return obs;
    case Strategy::lie:
      return 1 - obs;
    case Strategy::all_pos:
      return 1;
    case Strategy::all_neg:
      return 0;
  }
  throw InternalContradiction("unknown strategy");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::honest:
      return "honest";
    case Strategy::lie:
      return "lie";
    case Strategy::all_pos:
      return "all-pos";
    case Strategy::all_neg:
      return "all-neg";
  }
  throw InternalContradiction("unknown strategy");
}

Strategy strategy_from_name(const std::string& name) {
  for (Strategy s : kStrategies) {
    if (name == strategy_name(s)) return s;
  }
  throw MalformedInput("unknown strategy name: '" + name + "'");
}

int ProfileCounts::count(Strategy s) const {
  switch (s) {
    case Strategy::honest:
      return n_honest;
    case Strategy::lie:
      return n_lie;
    case Strategy::all_pos:
      return n_pos;
    case Strategy::all_neg:
      return n_neg;
  }
  throw InternalContradiction("unknown strategy");
}

ProfileCounts ProfileCounts::minus_one(Strategy s) const {
  if (count(s) < 1) {
    throw IndexOutOfRange(std::string("profile has no ") + strategy_name(s) +
                          " member to remove");
  }
  ProfileCounts out = *this;
  switch (s) {
    case Strategy::honest:
      --out.n_honest;
      break;
    case Strategy::lie:
      --out.n_lie;
      break;
    case Strategy::all_pos:
      --out.n_pos;
      break;
    case Strategy::all_neg:
      --out.n_neg;
      break;
  }
  return out;
}

std::string profile_name(const ProfileCounts& p) {
  std::ostringstream out;
  out << "neg:" << p.n_neg << " pos:" << p.n_pos << " honest:" << p.n_honest
      << " lie:" << p.n_lie;
  return out.str();
}

const Rat& PaymentScheme::pay(int report, int n) const {
  if (report != 0 && report != 1) {
    throw IndexOutOfRange("report must be 0 or 1, got " +
                          std::to_string(report));
  }
  if (n < 0 || n >= n_agents) {
    throw IndexOutOfRange("reference count " + std::to_string(n) +
                          " outside 0.." + std::to_string(n_agents - 1));
  }
  return report == 0 ? pay0[static_cast<std::size_t>(n)]
                     : pay1[static_cast<std::size_t>(n)];
}

void validate_scheme(const PaymentScheme& s) {
  if (s.n_agents < 2) throw TooFewAgents("schemes need at least two agents");
  const auto cols = static_cast<std::size_t>(s.n_agents);
  if (s.pay0.size() != cols || s.pay1.size() != cols) {
    throw DimensionMismatch("payment rows must have n_agents columns");
  }
  for (const auto* row : {&s.pay0, &s.pay1}) {
    for (const Rat& v : *row) {
      if (v < 0) throw OutOfRangeProbability("payments must be nonnegative");
    }
  }
}

PaymentScheme scheme_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("scheme JSON: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedInput("scheme JSON: expected an object");
  for (const char* field : {"n_agents", "pay0", "pay1"}) {
    if (!doc.contains(field)) {
      throw MalformedInput(std::string("scheme JSON: missing '") + field + "'");
    }
  }
  PaymentScheme s;
  if (!doc["n_agents"].is_number_integer()) {
    throw MalformedInput("n_agents: expected an integer");
  }
  s.n_agents = doc["n_agents"].get<int>();
  for (const auto& [field, row] :
       {std::pair<const char*, std::vector<Rat>*>{"pay0", &s.pay0},
        {"pay1", &s.pay1}}) {
    if (!doc[field].is_array()) {
      throw MalformedInput(std::string(field) + ": expected an array");
    }
    for (const auto& e : doc[field]) row->push_back(json_rat(e, field));
  }
  if (doc.contains("lambda")) s.lambda = json_rat(doc["lambda"], "lambda");
  if (doc.contains("epsilon")) s.epsilon = json_rat(doc["epsilon"], "epsilon");
  if (doc.contains("provenance")) {
    const auto& prov = doc["provenance"];
    if (!prov.is_object()) {
      throw MalformedInput("provenance: expected an object");
    }
    if (prov.contains("scenario")) s.scenario = prov["scenario"].get<std::string>();
    if (prov.contains("world")) s.world = prov["world"].get<std::string>();
  }
  validate_scheme(s);
  return s;
}

std::string scheme_to_json(const PaymentScheme& s) {
  json doc;
  doc["n_agents"] = s.n_agents;
  json row0 = json::array(), row1 = json::array();
  for (const Rat& v : s.pay0) row0.push_back(format_exact(v));
  for (const Rat& v : s.pay1) row1.push_back(format_exact(v));
  doc["pay0"] = std::move(row0);
  doc["pay1"] = std::move(row1);
  if (s.lambda) doc["lambda"] = format_exact(*s.lambda);
  if (s.epsilon) doc["epsilon"] = format_exact(*s.epsilon);
  if (!s.scenario.empty() || !s.world.empty()) {
    json prov;
    if (!s.scenario.empty()) prov["scenario"] = s.scenario;
    if (!s.world.empty()) prov["world"] = s.world;
    doc["provenance"] = std::move(prov);
  }
  return doc.dump(2) + "\n";
}

std::vector<Rat> report_count_distribution(const World& w, int obs,
                                           const ProfileCounts& others) {
  check_obs(obs);
  check_profile(others);
  const int m = others.total();
  const auto post = posterior(w, obs);

  std::vector<Rat> out(static_cast<std::size_t>(m) + 1, Rat(0));
  for (std::size_t t = 0; t < w.num_types(); ++t) {
    if (post[t] == 0) continue;
    // Honest members report high with the type's conditional, liars with its
    // complement; the blocks are independent given the type.
    const auto hon = binomial_row(w.high_prob[t], others.n_honest);
    const auto lie = binomial_row(1 - w.high_prob[t], others.n_lie);
    std::vector<Rat> conv(
        static_cast<std::size_t>(others.n_honest + others.n_lie) + 1, Rat(0));
    for (int a = 0; a <= others.n_honest; ++a) {
      if (hon[a] == 0) continue;
      for (int b = 0; b <= others.n_lie; ++b) {
        conv[static_cast<std::size_t>(a + b)] += hon[a] * lie[b];
      }
    }
    for (std::size_t n = 0; n < conv.size(); ++n) {
      out[n + static_cast<std::size_t>(others.n_pos)] += post[t] * conv[n];
    }
  }
  return out;
}

Rat expected_payoff(const PaymentScheme& s, const World& w, Strategy mine,
                    const ProfileCounts& others, int obs) {
  validate_scheme(s);
  if (others.total() != s.n_agents - 1) {
    throw DimensionMismatch("others must cover the remaining " +
                            std::to_string(s.n_agents - 1) + " agents");
  }
  const int r = strategy_report(mine, obs);
  const auto dist = report_count_distribution(w, obs, others);
  Rat value = 0;
  for (int n = 0; n < s.n_agents; ++n) {
    if (dist[n] != 0) value += dist[n] * s.pay(r, n);
  }
  return value;
}

Rat honest_expected_value(const PaymentScheme& s, const World& w) {
  validate_scheme(s);
  const auto sig = signal_prior(w);
  const ProfileCounts others{0, 0, s.n_agents - 1, 0};
  Rat value = 0;
  for (int obs : {0, 1}) {
    value += sig[obs] * expected_payoff(s, w, Strategy::honest, others, obs);
  }
  return value;
}

Rat lying_profile_value(const PaymentScheme& s, const World& w) {
  validate_scheme(s);
  const auto sig = signal_prior(w);
  const int last = s.n_agents - 1;
  Rat value = 0;
  for (int obs : {0, 1}) {
    // Peers who observed n high signals report last-n of them high; I report
    // the opposite of my own observation.
    const auto dist = reference_given_observation(w, obs, last);
    Rat given = 0;
    for (int n = 0; n <= last; ++n) {
      given += dist[n] * s.pay(1 - obs, last - n);
    }
    value += sig[obs] * given;
  }
  return value;
}

Rat coalition_revenue(const PaymentScheme& s, const World& w, int n_col, int c,
                      int r) {
  validate_scheme(s);
  if (n_col < 1 || n_col > s.n_agents) {
    throw IndexOutOfRange("coalition size outside 1..n_agents");
  }
  if (c < 0 || c > n_col) {
    throw IndexOutOfRange("coalition high count outside 0..n_col");
  }
  if (r < 0 || r > n_col) {
    throw IndexOutOfRange("coalition high reports outside 0..n_col");
  }
  const int outsiders = s.n_agents - n_col;
  const auto belief = posterior_given_counts(w, c, n_col);
  const auto dist = reference_distribution(w, belief, outsiders);
  Rat value = 0;
  for (int n = 0; n <= outsiders; ++n) {
    if (dist[n] == 0) continue;
    // A member reporting high sees r-1 high fellows plus n high outsiders; a
    // member reporting low sees all r high fellows.
    if (r > 0) value += dist[n] * r * s.pay(1, r - 1 + n);
    if (r < n_col) value += dist[n] * (n_col - r) * s.pay(0, r + n);
  }
  return value;
}

Rat scheme_cost(const PaymentScheme& s, const World& w, Objective objective) {
  if (objective == Objective::per_report) return honest_expected_value(s, w);
  validate_scheme(s);
  const auto dist = reference_distribution(w, w.prior, s.n_agents);
  Rat total = 0;
  for (int n = 0; n <= s.n_agents; ++n) {
    if (dist[n] == 0) continue;
    Rat paid = 0;
    if (n > 0) paid += Rat(n) * s.pay(1, n - 1);
    if (n < s.n_agents) paid += Rat(s.n_agents - n) * s.pay(0, n);
    total += dist[n] * paid;
  }
  return total;
}

}  // namespace peerpay
