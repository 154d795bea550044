// Python bindings.  Exact rationals cross the boundary as fractions.Fraction;
// ints, Fractions, and numeric strings are accepted anywhere a rational is
// expected, floats are rejected so no silent rounding can sneak in.

#include <peerpay/beliefs.hpp>
#include <peerpay/designers.hpp>
#include <peerpay/errors.hpp>
#include <peerpay/harness.hpp>
#include <peerpay/mechanism.hpp>
#include <peerpay/rational.hpp>
#include <peerpay/rng.hpp>
#include <peerpay/verifier.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;

namespace pybind11 {
namespace detail {

template <>
struct type_caster<peerpay::Rat> {
 public:
  PYBIND11_TYPE_CASTER(peerpay::Rat, const_name("fractions.Fraction"));

  bool load(handle src, bool) {
    if (isinstance<float_>(src)) return false;
    if (isinstance<int_>(src)) {
      value = peerpay::Rat(peerpay::BigInt(std::string(str(src))));
      return true;
    }
    if (isinstance<str>(src)) {
      value = peerpay::parse_rational(std::string(reinterpret_borrow<str>(src)));
      return true;
    }
    if (hasattr(src, "numerator") && hasattr(src, "denominator")) {
      const peerpay::BigInt num(std::string(str(src.attr("numerator"))));
      const peerpay::BigInt den(std::string(str(src.attr("denominator"))));
      value = peerpay::Rat(num, den);
      return true;
    }
    return false;
  }

  static handle cast(const peerpay::Rat& v, return_value_policy, handle) {
    object fraction = module_::import("fractions").attr("Fraction");
    return fraction(peerpay::format_exact(v)).release();
  }
};

}  // namespace detail
}  // namespace pybind11

namespace {

using namespace peerpay;

void register_errors(py::module_& m) {
  // The base goes first: translators registered later are tried first, so
  // every subclass wins over the catch-all.
  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<MalformedInput>(m, "MalformedInput", base.ptr());
  py::register_exception<NonNormalizedPrior>(m, "NonNormalizedPrior",
                                             base.ptr());
  py::register_exception<DuplicateConditional>(m, "DuplicateConditional",
                                               base.ptr());
  py::register_exception<OutOfRangeProbability>(m, "OutOfRangeProbability",
                                                base.ptr());
  py::register_exception<ZeroProbabilityObservation>(
      m, "ZeroProbabilityObservation", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<IndexOutOfRange>(m, "IndexOutOfRange", base.ptr());
  py::register_exception<PopulationTooLarge>(m, "PopulationTooLarge",
                                             base.ptr());
  py::register_exception<CombinatorialGuardExceeded>(
      m, "CombinatorialGuardExceeded", base.ptr());
  py::register_exception<MalformedProgram>(m, "MalformedProgram", base.ptr());
  py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
  py::register_exception<DegenerateWorld>(m, "DegenerateWorld", base.ptr());
  py::register_exception<TooFewAgents>(m, "TooFewAgents", base.ptr());
  py::register_exception<InternalContradiction>(m, "InternalContradiction",
                                                base.ptr());
}

}  // namespace

PYBIND11_MODULE(peerpay, m) {
  m.doc() =
      "Minimum-cost collusion-resistant peer-prediction payments: belief "
      "updating, payment tables, equilibrium audits, scheme designers, and "
      "seeded experiments, all in exact rational arithmetic.";

  register_errors(m);

  m.def("parse_rational", &parse_rational, py::arg("text"),
        "Exact Fraction from a decimal, scientific, or p/q string.");
  m.def("format_exact", &format_exact, py::arg("value"),
        "Shortest lossless string: terminating decimal or p/q.");
  m.def("format_sig", &format_sig, py::arg("value"), py::arg("digits") = 6,
        "Rounded to significant figures, half away from zero.");
  m.def("to_double", &to_double, py::arg("value"));

  py::class_<World>(m, "World")
      .def(py::init<>())
      .def(py::init([](std::vector<std::string> types, std::vector<Rat> prior,
                       std::vector<Rat> high_prob) {
             World w;
             w.types = std::move(types);
             w.prior = std::move(prior);
             w.high_prob = std::move(high_prob);
             return w;
           }),
           py::arg("types"), py::arg("prior"), py::arg("high_prob"))
      .def_readwrite("types", &World::types)
      .def_readwrite("prior", &World::prior)
      .def_readwrite("high_prob", &World::high_prob)
      .def("num_types", &World::num_types)
      .def("__repr__",
           [](const World& w) { return "<World " + world_digest(w) + ">"; });

  m.def("validate_world", &validate_world, py::arg("world"));
  m.def("interior_world", &interior_world, py::arg("world"));
  m.def("world_from_json", &world_from_json, py::arg("text"));
  m.def("world_to_json", &world_to_json, py::arg("world"));
  m.def("world_digest", &world_digest, py::arg("world"));
  m.def("signal_prior", &signal_prior, py::arg("world"));
  m.def("posterior", &posterior, py::arg("world"), py::arg("obs"));
  m.def("posterior_given_counts", &posterior_given_counts, py::arg("world"),
        py::arg("c"), py::arg("m"));
  m.def("binomial_row", &binomial_row, py::arg("p"), py::arg("m"));
  m.def("reference_distribution", &reference_distribution, py::arg("world"),
        py::arg("belief"), py::arg("m"));
  m.def("reference_given_observation", &reference_given_observation,
        py::arg("world"), py::arg("obs"), py::arg("m"));

  py::class_<RatioCheck>(m, "RatioCheck")
      .def_readwrite("ok", &RatioCheck::ok)
      .def_readwrite("first_violation", &RatioCheck::first_violation);
  m.def("likelihood_ratio_check", &likelihood_ratio_check, py::arg("world"),
        py::arg("m"));

  py::enum_<Strategy>(m, "Strategy")
      .value("honest", Strategy::honest)
      .value("lie", Strategy::lie)
      .value("all_pos", Strategy::all_pos)
      .value("all_neg", Strategy::all_neg);
  m.def("strategy_report", &strategy_report, py::arg("strategy"),
        py::arg("obs"));
  m.attr("STRATEGY_ORDER") =
      py::make_tuple(Strategy::all_neg, Strategy::all_pos, Strategy::honest,
                     Strategy::lie);

  py::class_<ProfileCounts>(m, "ProfileCounts")
      .def(py::init<>())
      .def(py::init([](int n_neg, int n_pos, int n_honest, int n_lie) {
             return ProfileCounts{n_neg, n_pos, n_honest, n_lie};
           }),
           py::arg("n_neg") = 0, py::arg("n_pos") = 0, py::arg("n_honest") = 0,
           py::arg("n_lie") = 0)
      .def_readwrite("n_neg", &ProfileCounts::n_neg)
      .def_readwrite("n_pos", &ProfileCounts::n_pos)
      .def_readwrite("n_honest", &ProfileCounts::n_honest)
      .def_readwrite("n_lie", &ProfileCounts::n_lie)
      .def("total", &ProfileCounts::total)
      .def("count", &ProfileCounts::count, py::arg("strategy"))
      .def("minus_one", &ProfileCounts::minus_one, py::arg("strategy"))
      .def("__eq__",
           [](const ProfileCounts& a, const ProfileCounts& b) { return a == b; })
      .def("__repr__", [](const ProfileCounts& p) {
        return "<ProfileCounts " + profile_name(p) + ">";
      });
  m.def("profile_name", &profile_name, py::arg("profile"));

  py::class_<PaymentScheme>(m, "PaymentScheme")
      .def(py::init<>())
      .def_readwrite("n_agents", &PaymentScheme::n_agents)
      .def_readwrite("pay0", &PaymentScheme::pay0)
      .def_readwrite("pay1", &PaymentScheme::pay1)
      .def_readwrite("lambda_", &PaymentScheme::lambda)
      .def_readwrite("epsilon", &PaymentScheme::epsilon)
      .def_readwrite("scenario", &PaymentScheme::scenario)
      .def_readwrite("world", &PaymentScheme::world)
      .def("pay", &PaymentScheme::pay, py::arg("report"), py::arg("n"));

  m.def("validate_scheme", &validate_scheme, py::arg("scheme"));
  m.def("scheme_from_json", &scheme_from_json, py::arg("text"));
  m.def("scheme_to_json", &scheme_to_json, py::arg("scheme"));
  m.def("report_count_distribution", &report_count_distribution,
        py::arg("world"), py::arg("obs"), py::arg("others"));
  m.def("expected_payoff", &expected_payoff, py::arg("scheme"),
        py::arg("world"), py::arg("mine"), py::arg("others"), py::arg("obs"));
  m.def("honest_expected_value", &honest_expected_value, py::arg("scheme"),
        py::arg("world"));
  m.def("lying_profile_value", &lying_profile_value, py::arg("scheme"),
        py::arg("world"));
  m.def("coalition_revenue", &coalition_revenue, py::arg("scheme"),
        py::arg("world"), py::arg("n_col"), py::arg("c"), py::arg("r"));

  py::enum_<Objective>(m, "Objective")
      .value("per_report", Objective::per_report)
      .value("total_budget", Objective::total_budget);
  m.def("scheme_cost", &scheme_cost, py::arg("scheme"), py::arg("world"),
        py::arg("objective"));

  py::class_<DeviationWitness>(m, "DeviationWitness")
      .def_readwrite("strategy", &DeviationWitness::strategy)
      .def_readwrite("observation", &DeviationWitness::observation)
      .def_readwrite("better_report", &DeviationWitness::better_report)
      .def_readwrite("gain", &DeviationWitness::gain);
  py::class_<GroupValue>(m, "GroupValue")
      .def_readwrite("strategy", &GroupValue::strategy)
      .def_readwrite("value", &GroupValue::value);
  py::class_<EquilibriumReport>(m, "EquilibriumReport")
      .def_readwrite("profile", &EquilibriumReport::profile)
      .def_readwrite("is_ne", &EquilibriumReport::is_ne)
      .def_readwrite("is_strict_ne", &EquilibriumReport::is_strict_ne)
      .def_readwrite("margin", &EquilibriumReport::margin)
      .def_readwrite("witness", &EquilibriumReport::witness)
      .def_readwrite("values", &EquilibriumReport::values);

  m.def("analyze_profile", &analyze_profile, py::arg("scheme"),
        py::arg("world"), py::arg("profile"));
  m.def("is_nash", &is_nash, py::arg("scheme"), py::arg("world"),
        py::arg("profile"));

  py::class_<BestResponse>(m, "BestResponse")
      .def_readwrite("report", &BestResponse::report)
      .def_readwrite("strict", &BestResponse::strict);
  m.def("best_response", &best_response, py::arg("scheme"), py::arg("world"),
        py::arg("others"), py::arg("obs"));
  m.def("enumerate_profiles", &enumerate_profiles, py::arg("scheme"),
        py::arg("world"));
  m.def("enumerate_pure_equilibria", &enumerate_pure_equilibria,
        py::arg("scheme"), py::arg("world"), py::arg("strict") = false);

  py::class_<ParetoComparison>(m, "ParetoComparison")
      .def_readwrite("a_values", &ParetoComparison::a_values)
      .def_readwrite("b_values", &ParetoComparison::b_values)
      .def_readwrite("a_dominates", &ParetoComparison::a_dominates)
      .def_readwrite("b_dominates", &ParetoComparison::b_dominates)
      .def_readwrite("a_weakly_dominates", &ParetoComparison::a_weakly_dominates)
      .def_readwrite("b_weakly_dominates",
                     &ParetoComparison::b_weakly_dominates);
  m.def("pareto_compare", &pareto_compare, py::arg("scheme"), py::arg("world"),
        py::arg("a"), py::arg("b"));

  py::class_<DominanceWitness>(m, "DominanceWitness")
      .def_readwrite("coalition_high", &DominanceWitness::coalition_high)
      .def_readwrite("observation", &DominanceWitness::observation)
      .def_readwrite("gap", &DominanceWitness::gap);
  py::class_<DominanceReport>(m, "DominanceReport")
      .def_readwrite("ok", &DominanceReport::ok)
      .def_readwrite("min_gap", &DominanceReport::min_gap)
      .def_readwrite("witness", &DominanceReport::witness);
  m.def("is_dominant_honest", &is_dominant_honest, py::arg("scheme"),
        py::arg("world"), py::arg("n_col"), py::arg("margin") = Rat(0));

  py::class_<CoalitionBest>(m, "CoalitionBest")
      .def_readwrite("report", &CoalitionBest::report)
      .def_readwrite("strict", &CoalitionBest::strict);
  m.def("coalition_best_report", &coalition_best_report, py::arg("scheme"),
        py::arg("world"), py::arg("n_col"), py::arg("c"));

  py::enum_<Scenario>(m, "Scenario")
      .value("optimal_ic", Scenario::optimal_ic)
      .value("unique_symmetric", Scenario::unique_symmetric)
      .value("pareto_symmetric", Scenario::pareto_symmetric)
      .value("full_asymmetric_pareto", Scenario::full_asymmetric_pareto)
      .value("partial_symmetric", Scenario::partial_symmetric)
      .value("partial_asymmetric", Scenario::partial_asymmetric)
      .value("dominant", Scenario::dominant)
      .value("sybil", Scenario::sybil);
  m.def("scenario_name", &scenario_name, py::arg("scenario"));
  m.def("scenario_from_name", &scenario_from_name, py::arg("name"));

  py::enum_<CollusionMode>(m, "CollusionMode")
      .value("unique", CollusionMode::unique)
      .value("pareto", CollusionMode::pareto);
  py::enum_<ScoringRule>(m, "ScoringRule")
      .value("quadratic", ScoringRule::quadratic)
      .value("logarithmic", ScoringRule::logarithmic);

  py::class_<DesignRequest>(m, "DesignRequest")
      .def(py::init([](World world, int n_agents, Scenario scenario, int n_col,
                       CollusionMode mode, Rat margin,
                       std::optional<Rat> epsilon, Rat delta,
                       Objective objective, bool full_table,
                       std::uint64_t guard) {
             DesignRequest req;
             req.world = std::move(world);
             req.n_agents = n_agents;
             req.scenario = scenario;
             req.n_col = n_col;
             req.mode = mode;
             req.margin = std::move(margin);
             req.epsilon = std::move(epsilon);
             req.delta = std::move(delta);
             req.objective = objective;
             req.full_table = full_table;
             req.guard = guard;
             return req;
           }),
           py::arg("world"), py::arg("n_agents"),
           py::arg("scenario") = Scenario::optimal_ic, py::arg("n_col") = 1,
           py::arg("mode") = CollusionMode::unique, py::arg("margin") = Rat(1),
           py::arg("epsilon") = std::nullopt, py::arg("delta") = Rat(0),
           py::arg("objective") = Objective::per_report,
           py::arg("full_table") = false, py::arg("guard") = 1000000)
      .def_readwrite("world", &DesignRequest::world)
      .def_readwrite("n_agents", &DesignRequest::n_agents)
      .def_readwrite("scenario", &DesignRequest::scenario)
      .def_readwrite("n_col", &DesignRequest::n_col)
      .def_readwrite("mode", &DesignRequest::mode)
      .def_readwrite("margin", &DesignRequest::margin)
      .def_readwrite("epsilon", &DesignRequest::epsilon)
      .def_readwrite("delta", &DesignRequest::delta)
      .def_readwrite("objective", &DesignRequest::objective)
      .def_readwrite("full_table", &DesignRequest::full_table)
      .def_readwrite("guard", &DesignRequest::guard);

  m.def("design", &design, py::arg("request"),
        py::call_guard<py::gil_scoped_release>(),
        "Solve the requested scenario and return its cheapest scheme.");
  m.def("closed_form_optimal_ic", &closed_form_optimal_ic, py::arg("world"),
        py::arg("n_agents"), py::arg("margin"));
  m.def("closed_form_unique_symmetric", &closed_form_unique_symmetric,
        py::arg("world"), py::arg("n_agents"), py::arg("margin"),
        py::arg("epsilon"));
  m.def("closed_form_sybil", &closed_form_sybil, py::arg("world"),
        py::arg("n_agents"), py::arg("margin"), py::arg("rule"));
  m.def("max_coalition", &max_coalition, py::arg("world"), py::arg("n_agents"),
        py::arg("margin"), py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init([](std::uint64_t seed, int samples,
                       std::vector<int> agent_counts, Rat margin,
                       int precision, int workers) {
             ExperimentConfig cfg;
             cfg.seed = seed;
             cfg.samples = samples;
             cfg.agent_counts = std::move(agent_counts);
             cfg.margin = std::move(margin);
             cfg.precision = precision;
             cfg.workers = workers;
             return cfg;
           }),
           py::arg("seed"), py::arg("samples") = 200,
           py::arg("agent_counts") = std::vector<int>{5, 10},
           py::arg("margin") = Rat(1), py::arg("precision") = 6,
           py::arg("workers") = 0)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("samples", &ExperimentConfig::samples)
      .def_readwrite("agent_counts", &ExperimentConfig::agent_counts)
      .def_readwrite("margin", &ExperimentConfig::margin)
      .def_readwrite("precision", &ExperimentConfig::precision)
      .def_readwrite("workers", &ExperimentConfig::workers);

  m.def(
      "generate_problem",
      [](std::uint64_t seed, int index) {
        if (index < 0) {
          throw IndexOutOfRange("problem index must be nonnegative");
        }
        auto rng = substream(seed, static_cast<std::uint64_t>(index));
        return generate_problem(rng);
      },
      py::arg("seed"), py::arg("index") = 0,
      "World `index` of the stream a seeded experiment would consume.");
  m.def("run_cost_curve", &run_cost_curve, py::arg("config"),
        py::arg("scenario"), py::call_guard<py::gil_scoped_release>(),
        "CSV of normalized scheme cost as the coalition grows.");
  m.def("run_coalition_bound", &run_coalition_bound, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(),
        "CSV distribution of the largest protected coalition size.");
  m.def("run_concept_comparison", &run_concept_comparison, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(),
        "Per-instance CSV of pareto vs unique vs dominant normalized cost.");
}
