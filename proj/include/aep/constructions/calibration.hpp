#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"
#include "aep/verifier/certificate.hpp"

namespace aep {

inline constexpr double kQuadratureTolerance = 1e-6;
inline constexpr std::size_t kQuadratureGrid = 100'000;

// p-to-e calibrator f(p) = kappa * p^(kappa - 1) on [0, 1], zero above 1,
// optionally capped at c.
class Calibrator {
 public:
  static Calibrator power(double kappa);
  static Calibrator truncated_power(double kappa, double cap);

  double operator()(double p) const;
  double kappa() const { return kappa_; }
  const std::optional<double>& cap() const { return cap_; }
  bool bounded() const { return cap_.has_value(); }
  // Midpoint rule for the integral of f over [0, 1].
  double quadrature_mass(std::size_t grid = kQuadratureGrid) const;

 private:
  Calibrator(double kappa, std::optional<double> cap);

  double kappa_;
  std::optional<double> cap_;
};

// Row m of a triangular p-array: row time n holds p_{m, m+n}.
struct PArray {
  std::vector<TreeProcess> rows;
  std::vector<std::size_t> index;  // m of each row

  void validate() const;
};

struct Calibrated {
  BiProcess e;
  std::vector<std::size_t> index;  // m of each row, copied from the p-array
  // Row holds an infinite value (f unbounded and some p = 0).
  std::vector<bool> non_integrable;
};

Calibrated calibrate(const PArray& p, const Calibrator& f);

inline constexpr double kPCap = 2.0;

// min(max_{k >= m} p_{m,k}, 2) per path, one value per node of the row's last
// level.
std::vector<double> supremum_p(const PArray& p, std::size_t row);

// min(min_{k >= m} p_{m,k}, 2) per path: the running-infimum reduction that
// the stopped events {p_{m, m+tau} <= alpha} are contained in.
std::vector<double> infimum_p(const PArray& p, std::size_t row);

// Values with probabilities; empty weights mean equal weights.
struct WeightedSample {
  std::vector<double> values;
  std::vector<double> weights;

  double cdf(double x) const;  // P[q <= x]
};

// Leaf values of a row weighted by one measure's path probabilities.
WeightedSample leaf_sample(const MeasureFamily& family, std::size_t measure,
                           std::vector<double> values);

struct StrongPReport {
  std::vector<std::size_t> m;
  std::vector<double> alpha;
  std::vector<std::vector<double>> cdf;  // cdf[row][a] = P[q_m <= alpha_a]
  std::vector<double> strong_ratio;      // sup_a cdf / alpha
  TrendReport strong;                    // on strong_ratio
  std::vector<std::vector<bool>> weak_pass;  // cdf <= alpha
};

StrongPReport check_strong_p(std::span<const WeightedSample> q,
                             std::span<const std::size_t> m,
                             std::span<const double> alpha,
                             const ToleranceSchedule& schedule = default_tolerance());

}  // namespace aep
