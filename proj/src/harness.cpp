#include <peerpay/harness.hpp>

#include <peerpay/errors.hpp>
#include <peerpay/mechanism.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

namespace peerpay {

namespace {

void require_config(const ExperimentConfig& cfg) {
  if (cfg.samples < 1) throw MalformedInput("samples must be at least 1");
  if (cfg.precision < 1) throw MalformedInput("precision must be at least 1");
  if (cfg.margin <= 0) throw MalformedInput("margin must be positive");
  for (const int n : cfg.agent_counts) {
    if (n < 2) throw MalformedInput("agent counts must be at least 2");
  }
}

int worker_count(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("PEERPAY_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 1;
}

// Runs job(0..count-1) across the workers.  Each job writes only its own
// result slot and failures are rethrown in index order, so neither the output
// nor the surfaced error depends on scheduling.
void run_jobs(int count, int workers, const std::function<void(int)>& job) {
  std::vector<std::exception_ptr> failures(count);
  auto guarded = [&](int i) {
    try {
      job(i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) guarded(i);
  } else {
    std::atomic<int> cursor{0};
    auto drain = [&] {
      for (;;) {
        const int i = cursor.fetch_add(1);
        if (i >= count) return;
        guarded(i);
      }
    };
    std::vector<std::thread> pool;
    const int spawn = std::min(workers, count);
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }
  for (int i = 0; i < count; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }
}

void append_header(std::ostream& out, const char* table,
                   const ExperimentConfig& cfg) {
  out << "# peerpay " << table << "\n";
  out << "# seed=" << cfg.seed << " samples=" << cfg.samples
      << " agent_counts=";
  for (std::size_t i = 0; i < cfg.agent_counts.size(); ++i) {
    if (i) out << ",";
    out << cfg.agent_counts[i];
  }
  out << " margin=" << cfg.margin << " precision=" << cfg.precision << "\n";
  out << "# generator: types uniform 2..20; conditionals distinct "
         "ten-thousandths in [0.01, 0.99]; prior normalized integer weights "
         "1..10000\n";
}

DesignRequest make_request(const World& w, int n, Scenario scenario, int n_col,
                           const Rat& margin,
                           CollusionMode mode = CollusionMode::unique) {
  DesignRequest req;
  req.world = w;
  req.n_agents = n;
  req.scenario = scenario;
  req.n_col = n_col;
  req.mode = mode;
  req.margin = margin;
  return req;
}

Rat baseline_cost(const World& w, int n, const Rat& margin) {
  const auto s = design(make_request(w, n, Scenario::optimal_ic, 1, margin));
  return scheme_cost(s, w, Objective::per_report);
}

int coalition_cap(Scenario scenario, int n) {
  return scenario == Scenario::dominant ? n / 2 : n - 1;
}

}  // namespace

World generate_problem(SplitMix64& rng) {
  World w;
  const int n_types = rng.uniform(2, 20);
  std::vector<int> used;
  Rat weight_sum = 0;
  for (int t = 0; t < n_types; ++t) {
    w.types.push_back("t" + std::to_string(t));
    int draw = rng.uniform(100, 9900);
    while (std::find(used.begin(), used.end(), draw) != used.end()) {
      draw = rng.uniform(100, 9900);
    }
    used.push_back(draw);
    w.high_prob.push_back(Rat(draw, 10000));
    w.prior.push_back(Rat(rng.uniform(1, 10000)));
    weight_sum += w.prior.back();
  }
  for (auto& p : w.prior) p /= weight_sum;
  validate_world(w);
  return w;
}

std::string run_cost_curve(const ExperimentConfig& cfg, Scenario scenario) {
  require_config(cfg);
  if (scenario != Scenario::dominant && scenario != Scenario::sybil) {
    throw MalformedInput("cost curves cover the dominant and sybil scenarios");
  }

  // results[i].at(a) holds, per coalition size, the exact cost ratio or
  // nothing when that instance was infeasible.
  using Slots = std::vector<std::vector<std::optional<Rat>>>;
  std::vector<Slots> results(cfg.samples);
  run_jobs(cfg.samples, worker_count(cfg), [&](int i) {
    SplitMix64 rng = substream(cfg.seed, i);
    const World w = generate_problem(rng);
    auto& slots = results[i];
    slots.resize(cfg.agent_counts.size());
    for (std::size_t a = 0; a < cfg.agent_counts.size(); ++a) {
      const int n = cfg.agent_counts[a];
      const int cap = coalition_cap(scenario, n);
      const Rat base = baseline_cost(w, n, cfg.margin);
      slots[a].resize(cap);
      for (int k = 1; k <= cap; ++k) {
        try {
          const auto s = design(make_request(w, n, scenario, k, cfg.margin));
          slots[a][k - 1] = scheme_cost(s, w, Objective::per_report) / base;
        } catch (const Infeasible&) {
        }
      }
    }
  });

  std::ostringstream out;
  append_header(out, "cost-curve", cfg);
  out << "# scenario=" << scenario_name(scenario) << "\n";
  out << "n_agents,n_col,fraction,mean_normalized_cost,samples_used,"
         "infeasible\n";
  for (std::size_t a = 0; a < cfg.agent_counts.size(); ++a) {
    const int n = cfg.agent_counts[a];
    const int cap = coalition_cap(scenario, n);
    for (int k = 1; k <= cap; ++k) {
      Rat sum = 0;
      int used = 0;
      for (const auto& slots : results) {
        if (const auto& cell = slots[a][k - 1]) {
          sum += *cell;
          ++used;
        }
      }
      out << n << "," << k << "," << format_sig(Rat(k, n), cfg.precision)
          << ",";
      if (used > 0) {
        const Rat mean = sum / used;
        out << format_sig(mean, cfg.precision);
      } else {
        out << "nan";
      }
      out << "," << used << "," << (cfg.samples - used) << "\n";
    }
  }
  return out.str();
}

std::string run_coalition_bound(const ExperimentConfig& cfg) {
  require_config(cfg);

  std::vector<std::vector<int>> bounds(cfg.samples);
  run_jobs(cfg.samples, worker_count(cfg), [&](int i) {
    SplitMix64 rng = substream(cfg.seed, i);
    const World w = generate_problem(rng);
    auto& per_n = bounds[i];
    per_n.resize(cfg.agent_counts.size());
    for (std::size_t a = 0; a < cfg.agent_counts.size(); ++a) {
      per_n[a] =
          max_coalition(w, cfg.agent_counts[a], cfg.margin, Scenario::dominant);
    }
  });

  std::ostringstream out;
  append_header(out, "coalition-bound", cfg);
  out << "# scenario=dominant\n";
  out << "n_agents,bound,count,fraction\n";
  for (std::size_t a = 0; a < cfg.agent_counts.size(); ++a) {
    const int n = cfg.agent_counts[a];
    std::vector<int> histogram(n / 2 + 1, 0);
    for (const auto& per_n : bounds) ++histogram[per_n[a]];
    for (int b = n / 2; b >= 0; --b) {
      out << n << "," << b << "," << histogram[b] << ","
          << format_sig(Rat(histogram[b], cfg.samples), cfg.precision) << "\n";
    }
  }
  return out.str();
}

std::string run_concept_comparison(const ExperimentConfig& cfg) {
  require_config(cfg);

  // Normalized cost per instance for pareto, unique, dominant, in that order.
  using Triple = std::array<std::optional<Rat>, 3>;
  using Slots = std::vector<std::vector<Triple>>;
  std::vector<Slots> results(cfg.samples);
  run_jobs(cfg.samples, worker_count(cfg), [&](int i) {
    SplitMix64 rng = substream(cfg.seed, i);
    const World w = generate_problem(rng);
    auto& slots = results[i];
    slots.resize(cfg.agent_counts.size());
    for (std::size_t a = 0; a < cfg.agent_counts.size(); ++a) {
      const int n = cfg.agent_counts[a];
      const Rat base = baseline_cost(w, n, cfg.margin);
      slots[a].resize(n / 2);
      for (int k = 1; k <= n / 2; ++k) {
        auto& cell = slots[a][k - 1];
        auto attempt = [&](int which, auto&& solve) {
          try {
            cell[which] = scheme_cost(solve(), w, Objective::per_report) / base;
          } catch (const Infeasible&) {
          }
        };
        attempt(0, [&] {
          return design(make_request(w, n, Scenario::partial_symmetric, k,
                                     cfg.margin, CollusionMode::pareto));
        });
        attempt(1, [&] {
          return design(make_request(w, n, Scenario::partial_symmetric, k,
                                     cfg.margin, CollusionMode::unique));
        });
        // The third column strengthens the unique-mode program with the
        // per-insider dominance rows rather than dropping its groups; the
        // plain dominant program is not a superset of the unique one, so
        // only the stacked form keeps the chain nested.
        attempt(2, [&] {
          return design_dominant_unique(make_request(
              w, n, Scenario::dominant, k, cfg.margin, CollusionMode::unique));
        });
        // Constraint-set inclusion: each concept tightens the previous one,
        // so feasibility and cost must be monotone across the triple.
        if (cell[1] && (!cell[0] || *cell[0] > *cell[1])) {
          throw InternalContradiction(
              "pareto relaxation lost to the unique-mode program");
        }
        if (cell[2] && (!cell[1] || *cell[1] > *cell[2])) {
          throw InternalContradiction(
              "unique-mode program lost to the dominant program");
        }
      }
    }
  });

  std::ostringstream out;
  append_header(out, "concept-compare", cfg);
  out << "# ordering pareto<=unique<=dominant verified on every instance\n";
  out << "n_agents,n_col,fraction,problem,pareto,unique,dominant\n";
  for (std::size_t a = 0; a < cfg.agent_counts.size(); ++a) {
    const int n = cfg.agent_counts[a];
    for (int k = 1; k <= n / 2; ++k) {
      for (int i = 0; i < cfg.samples; ++i) {
        const auto& cell = results[i][a][k - 1];
        out << n << "," << k << "," << format_sig(Rat(k, n), cfg.precision)
            << "," << i;
        for (const auto& value : cell) {
          out << ",";
          if (value) {
            out << format_sig(*value, cfg.precision);
          } else {
            out << "nan";
          }
        }
        out << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace peerpay
