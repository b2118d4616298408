#include "aep/montecarlo/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "aep/constructions/products.hpp"
#include "aep/core/error.hpp"

namespace aep {
namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

// Runs fn(i) for i < count on `workers` threads; index i always goes to the
// same slot, so the schedule cannot change results.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void SimConfig::validate() const {
  require(!m_grid.empty(), "m_grid", "must not be empty");
  for (std::size_t m : m_grid) require(m >= 1, "m_grid", "entries must be >= 1");
  require(drift_scale >= 0.0 && std::isfinite(drift_scale), "drift_scale",
          "must be finite and >= 0");
  require(sigma > 0.0 && std::isfinite(sigma), "sigma", "must be positive");
  require(std::isfinite(trunc_lower), "trunc_lower", "must be finite");
  require(horizon_scale > 0.0 && std::isfinite(horizon_scale), "horizon_scale",
          "must be positive");
  require(u_halfwidth >= 0.0 && u_halfwidth <= 0.5, "u_halfwidth", "must lie in [0, 0.5]");
  require(!p_exp.empty(), "p_exp", "must not be empty");
  for (double p : p_exp) require(p > 0.0 && p < 1.0, "p_exp", "entries must lie in (0, 1)");
  require(alpha > 0.0 && alpha < 1.0, "alpha", "must lie in (0, 1)");
  require(n_traj >= 1, "n_traj", "must be >= 1");
  require(n_end >= 1, "n_end", "must be >= 1");
  require(n_end < static_cast<std::size_t>(INT32_MAX), "n_end", "too large");
  for (std::size_t m : m_grid) {
    require(sigma < drift(m) - trunc_lower, "sigma",
            fmt::format("must be below d_m - trunc_lower = {} at m = {}",
                        drift(m) - trunc_lower, m));
  }
}

double SimConfig::drift(std::size_t m) const {
  return drift_scale / static_cast<double>(m);
}

std::size_t SimConfig::horizon(std::size_t m, double p) const {
  return power_horizon(PowerRule{horizon_scale, p}, m);
}

Estimate wilson_interval(std::size_t count, std::size_t n, double z) {
  if (n == 0) throw PreconditionError("Wilson interval needs at least one trial");
  if (count > n) throw PreconditionError("more successes than trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(count) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  Estimate e;
  e.p_hat = p;
  e.lo = count == 0 ? 0.0 : std::clamp(center - half, 0.0, p);
  e.hi = count == n ? 1.0 : std::clamp(center + half, p, 1.0);
  return e;
}

Estimate excursion_estimate(const std::vector<bool>& crossed) {
  return wilson_interval(static_cast<std::size_t>(std::count(crossed.begin(), crossed.end(), true)),
                         crossed.size());
}

RowSimulation simulate_row(std::size_t m, const SimConfig& config, unsigned workers,
                           std::size_t n_paths) {
  config.validate();
  RowSimulation sim;
  sim.m = m;
  const double d = config.drift(m);
  sim.params = trunc_normal_params(d, config.sigma * config.sigma, config.trunc_lower);
  const double threshold = 1.0 / config.alpha;
  const std::size_t n_traj = config.n_traj;

  n_paths = std::min(n_paths, n_traj);
  for (std::size_t j = 0; j < n_paths; ++j) sim.path_ids.push_back(j * n_traj / n_paths);
  sim.paths.resize(n_paths);

  sim.tau.assign(n_traj, kNoCrossing);
  std::vector<double> min_factor(n_traj, kInfinity);
  std::vector<double> min_value(n_traj, 1.0);

  parallel_for(n_traj, workers, [&](std::size_t t) {
    CounterRng rng(derive_key({config.seed, m, t}));
    TruncNormalSampler g(sim.params);
    std::uniform_real_distribution<double> u(1.0 - config.u_halfwidth,
                                             1.0 + config.u_halfwidth);

    const auto slot = std::lower_bound(sim.path_ids.begin(), sim.path_ids.end(), t);
    std::vector<double>* path = nullptr;
    if (slot != sim.path_ids.end() && *slot == t) {
      path = &sim.paths[static_cast<std::size_t>(slot - sim.path_ids.begin())];
      path->reserve(config.n_end + 1);
      path->push_back(1.0);
    }

    double e = 1.0;
    for (std::size_t n = 1; n <= config.n_end; ++n) {
      const double factor = u(rng) + g(rng);
      min_factor[t] = std::min(min_factor[t], factor);
      e *= factor;
      min_value[t] = std::min(min_value[t], e);
      if (path) path->push_back(e);
      if (e >= threshold && sim.tau[t] == kNoCrossing) {
        sim.tau[t] = static_cast<std::int32_t>(n);
        if (!path) break;
      }
    }
  });

  sim.min_factor = *std::min_element(min_factor.begin(), min_factor.end());
  sim.min_value = *std::min_element(min_value.begin(), min_value.end());
  return sim;
}

ExcursionRow excursion_row(const RowSimulation& sim, const SimConfig& config, double p) {
  ExcursionRow row;
  row.m = sim.m;
  row.p_exp = p;
  row.r_m = config.horizon(sim.m, p);
  row.alpha = config.alpha;
  row.n_traj = sim.tau.size();
  row.seed = config.seed;
  row.truncated = row.r_m > config.n_end;
  for (std::int32_t tau : sim.tau) {
    if (tau == kNoCrossing) continue;
    ++row.n_cross_any;
    if (static_cast<std::size_t>(tau) < row.r_m) ++row.n_cross;
  }
  row.estimate = wilson_interval(row.n_cross, row.n_traj);
  return row;
}

ExcursionReport experiment_grid(const SimConfig& config, unsigned workers,
                                std::size_t n_paths) {
  config.validate();
  ExcursionReport report;
  for (std::size_t m : config.m_grid) {
    report.simulations.push_back(simulate_row(m, config, workers, n_paths));
    for (double p : config.p_exp) {
      report.rows.push_back(excursion_row(report.simulations.back(), config, p));
      const ExcursionRow& row = report.rows.back();
      if (row.truncated) {
        report.warnings.push_back(fmt::format(
            "m = {}, p = {}: r_m = {} exceeds n_end = {}; crossings counted up to n_end",
            m, p, row.r_m, config.n_end));
      }
    }
  }
  return report;
}

void write_excursion_csv(const ExcursionReport& report, std::ostream& out) {
  out << kExcursionHeader << '\n';
  for (const ExcursionRow& r : report.rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", r.m, r.p_exp, r.r_m, r.alpha,
               r.n_traj, r.n_cross, r.estimate.p_hat, r.estimate.lo, r.estimate.hi,
               r.seed);
  }
}

void write_paths_csv(const RowSimulation& sim, std::ostream& out) {
  out << "traj,n,value\n";
  for (std::size_t j = 0; j < sim.paths.size(); ++j) {
    for (std::size_t n = 0; n < sim.paths[j].size(); ++n) {
      fmt::print(out, "{},{},{}\n", sim.path_ids[j], n, sim.paths[j][n]);
    }
  }
}

std::string paths_file_name(std::size_t m, double p) {
  return fmt::format("paths_{}_{}.csv", m, p);
}

}  // namespace aep
