#include "aep/montecarlo/trunc_normal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aep/core/error.hpp"

namespace aep {
namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Mills ratio (1 - Phi(x)) / phi(x) by Laplace's continued fraction, x >= 5.
double mills_tail(double x) {
  double f = x;
  for (int k = 80; k >= 1; --k) f = x + k / f;
  return 1.0 / f;
}

struct Residual {
  double mean;
  double var;
  double norm() const { return std::max(std::abs(mean), std::abs(var)); }
};

Residual residual(double mu, double s, double b, double mean, double var) {
  const TruncatedMoments t = truncated_moments(mu, s, b);
  return {t.mean - mean, t.var - var};
}

bool newton(double mean, double var, double b, TruncNormalParams& out) {
  double mu = mean;
  double log_s = 0.5 * std::log(var);
  Residual r = residual(mu, std::exp(log_s), b, mean, var);
  for (int it = 1; it <= 200; ++it) {
    out.iterations = it;
    if (r.norm() <= 1e-15) break;
    const double s = std::exp(log_s);
    const double beta = (b - mu) / s;
    const double lam = normal_hazard(beta);
    const double lam1 = lam * (lam - beta);
    const double lam2 = lam1 * (lam - beta) + lam * (lam1 - 1.0);
    const double g = 1.0 - lam1;
    const double g1 = -lam2;
    // Jacobian in (mu, log s).
    const double j11 = 1.0 - lam1;
    const double j12 = s * (lam - beta * lam1);
    const double j21 = -s * g1;
    const double j22 = s * (2.0 * s * g - s * beta * g1);
    const double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || det == 0.0) return false;
    const double dmu = (r.mean * j22 - r.var * j12) / det;
    const double dlog = (j11 * r.var - j21 * r.mean) / det;

    double step = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      const double mu2 = mu - step * dmu;
      const double log2 = log_s - std::clamp(step * dlog, -2.0, 2.0);
      const Residual r2 = residual(mu2, std::exp(log2), b, mean, var);
      if (std::isfinite(r2.norm()) && r2.norm() < r.norm()) {
        mu = mu2;
        log_s = log2;
        r = r2;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  out.mu = mu;
  out.s = std::exp(log_s);
  return r.norm() <= kMomentTolerance;
}

// For fixed s the truncated mean increases in mu.
double mu_for_mean(double s, double b, double mean) {
  double lo = mean - 50.0 * s - 1.0;
  double hi = mean;
  while (truncated_moments(lo, s, b).mean > mean) lo -= 2.0 * (hi - lo);
  for (int i = 0; i < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (truncated_moments(mid, s, b).mean < mean ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool bisection(double mean, double var, double b, TruncNormalParams& out) {
  // Along the curve of matching mean the variance increases with s.
  double lo = std::log(std::sqrt(var)) - 10.0;
  double hi = std::log(std::sqrt(var)) + 10.0;
  auto var_at = [&](double log_s) {
    const double s = std::exp(log_s);
    return truncated_moments(mu_for_mean(s, b, mean), s, b).var;
  };
  if (var_at(lo) > var || var_at(hi) < var) return false;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (var_at(mid) < var ? lo : hi) = mid;
    out.iterations = i + 1;
  }
  out.s = std::exp(0.5 * (lo + hi));
  out.mu = mu_for_mean(out.s, b, mean);
  return residual(out.mu, out.s, b, mean, var).norm() <= kMomentTolerance;
}

}  // namespace

double normal_hazard(double x) {
  if (x >= 5.0) return 1.0 / mills_tail(x);
  return normal_pdf(x) / (0.5 * std::erfc(x / std::numbers::sqrt2));
}

TruncatedMoments truncated_moments(double mu, double s, double b) {
  const double beta = (b - mu) / s;
  const double lam = normal_hazard(beta);
  return {mu + s * lam, s * s * (1.0 - lam * (lam - beta))};
}

double TruncNormalParams::residual_mean() const { return mean - target_mean; }
double TruncNormalParams::residual_var() const { return var - target_var; }

TruncNormalParams trunc_normal_params(double mean, double var, double b) {
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw InfeasibleError("target variance must be positive and finite");
  }
  if (!(mean > b) || !(std::sqrt(var) < mean - b)) {
    throw InfeasibleError("no truncated normal above " + std::to_string(b) + " has mean " +
                          std::to_string(mean) + " and standard deviation " +
                          std::to_string(std::sqrt(var)) +
                          " (needs sd < mean - bound)");
  }
  TruncNormalParams out;
  out.b = b;
  out.target_mean = mean;
  out.target_var = var;
  if (!newton(mean, var, b, out)) {
    out.bisection = true;
    bisection(mean, var, b, out);
  }
  const TruncatedMoments achieved = truncated_moments(out.mu, out.s, b);
  out.mean = achieved.mean;
  out.var = achieved.var;
  if (!(std::abs(out.residual_mean()) <= kMomentTolerance &&
        std::abs(out.residual_var()) <= kMomentTolerance)) {
    throw InfeasibleError("moment matching did not converge: residuals " +
                          std::to_string(out.residual_mean()) + ", " +
                          std::to_string(out.residual_var()));
  }
  return out;
}

TruncNormalSampler::TruncNormalSampler(const TruncNormalParams& params)
    : mu_(params.mu),
      s_(params.s),
      b_(params.b),
      a_((params.b - params.mu) / params.s),
      rate_(0.5 * (a_ + std::sqrt(a_ * a_ + 4.0))),
      exponential_(rate_) {}

double TruncNormalSampler::operator()(CounterRng& rng) {
  double z;
  if (a_ < 0.0) {
    do {
      z = normal_(rng);
    } while (z < a_);
  } else {
    while (true) {
      z = a_ + exponential_(rng);
      const double d = z - rate_;
      if (uniform_(rng) <= std::exp(-0.5 * d * d)) break;
    }
  }
  // Rounding in mu + s z may land one ulp below the bound.
  return std::max(b_, mu_ + s_ * z);
}

double sample_trunc_normal(const TruncNormalParams& params, CounterRng& rng) {
  TruncNormalSampler sampler(params);
  return sampler(rng);
}

}  // namespace aep
