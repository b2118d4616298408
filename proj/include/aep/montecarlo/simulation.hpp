#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aep/montecarlo/trunc_normal.hpp"

namespace aep {

struct SimConfig {
  std::vector<std::size_t> m_grid{32, 64, 128, 256, 512, 2048, 4096};
  double drift_scale = 4.0;  // d_m = drift_scale / m
  double sigma = 0.35;
  double trunc_lower = -0.5 + 1e-6;
  double horizon_scale = 4.0;  // r_m = floor(horizon_scale * m^p)
  double u_halfwidth = 0.5;    // U uniform on [1 - h, 1 + h]
  std::vector<double> p_exp{0.5};
  double alpha = 0.05;
  std::size_t n_traj = 10'000;
  std::size_t n_end = 500;
  std::uint64_t seed = 0;

  // ConfigError naming the offending key.
  void validate() const;
  double drift(std::size_t m) const;
  std::size_t horizon(std::size_t m, double p) const;

  bool operator==(const SimConfig&) const = default;
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

struct Estimate {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

Estimate wilson_interval(std::size_t count, std::size_t n, double z = kWilsonZ95);
Estimate excursion_estimate(const std::vector<bool>& crossed);

inline constexpr std::int32_t kNoCrossing = -1;

struct RowSimulation {
  std::size_t m = 0;
  TruncNormalParams params;
  // First n in 1..n_end with E_n >= 1/alpha, or kNoCrossing.
  std::vector<std::int32_t> tau;
  double min_factor = 0.0;
  double min_value = 0.0;  // smallest E_n seen before stopping
  // Retained trajectories: ids and E_0..E_{n_end}.
  std::vector<std::size_t> path_ids;
  std::vector<std::vector<double>> paths;
};

// Trajectory t uses the stream keyed by (seed, m, t); results do not depend
// on `workers`. `n_paths` trajectories, evenly spaced, are kept in full.
RowSimulation simulate_row(std::size_t m, const SimConfig& config, unsigned workers = 1,
                           std::size_t n_paths = 0);

struct ExcursionRow {
  std::size_t m = 0;
  double p_exp = 0.0;
  std::size_t r_m = 0;
  double alpha = 0.0;
  std::size_t n_traj = 0;
  std::size_t n_cross = 0;      // tau < r_m
  Estimate estimate;
  std::size_t n_cross_any = 0;  // tau <= n_end
  std::uint64_t seed = 0;
  bool truncated = false;       // r_m > n_end
};

struct ExcursionReport {
  std::vector<ExcursionRow> rows;  // (m, p) order
  std::vector<std::string> warnings;
  std::vector<RowSimulation> simulations;  // one per m
};

ExcursionRow excursion_row(const RowSimulation& sim, const SimConfig& config, double p);

// One simulation per m, shared by every exponent p.
ExcursionReport experiment_grid(const SimConfig& config, unsigned workers = 1,
                                std::size_t n_paths = 0);

inline constexpr const char* kExcursionHeader =
    "m,p_exp,r_m,alpha,n_traj,n_cross,p_hat,ci_lo,ci_hi,seed";

void write_excursion_csv(const ExcursionReport& report, std::ostream& out);
void write_paths_csv(const RowSimulation& sim, std::ostream& out);
std::string paths_file_name(std::size_t m, double p);

}  // namespace aep
