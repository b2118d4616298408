#pragma once

#include <random>

#include "aep/montecarlo/rng.hpp"

namespace aep {

// Standard normal hazard phi(x) / (1 - Phi(x)).
double normal_hazard(double x);

struct TruncatedMoments {
  double mean = 0.0;
  double var = 0.0;
};

// Moments of N(mu, s^2) conditioned on X >= b.
TruncatedMoments truncated_moments(double mu, double s, double b);

struct TruncNormalParams {
  double mu = 0.0;  // parent mean
  double s = 1.0;   // parent standard deviation
  double b = 0.0;   // lower bound
  double target_mean = 0.0;
  double target_var = 1.0;
  double mean = 0.0;  // achieved
  double var = 1.0;   // achieved
  int iterations = 0;
  bool bisection = false;  // Newton failed and the nested search was used

  double residual_mean() const;
  double residual_var() const;
};

inline constexpr double kMomentTolerance = 1e-9;

// Parent (mu, s) whose truncation at b has the given mean and variance.
// Throws InfeasibleError when sqrt(var) >= mean - b or the solve misses the
// tolerance.
TruncNormalParams trunc_normal_params(double mean, double var, double b);

// Draws >= b. Plain normal rejection when the standardized bound is negative,
// otherwise an exponential proposal shifted to the bound (Robert's method).
class TruncNormalSampler {
 public:
  explicit TruncNormalSampler(const TruncNormalParams& params);

  double operator()(CounterRng& rng);

 private:
  double mu_;
  double s_;
  double b_;
  double a_;     // standardized bound
  double rate_;  // optimal exponential rate for a >= 0
  std::normal_distribution<double> normal_;
  std::exponential_distribution<double> exponential_;
  std::uniform_real_distribution<double> uniform_;
};

double sample_trunc_normal(const TruncNormalParams& params, CounterRng& rng);

}  // namespace aep
