#include "aep/constructions/products.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "aep/core/error.hpp"
#include "aep/core/expectation.hpp"

namespace aep {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_weights(std::span<const double> w, const std::string& what) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
      throw PreconditionError(what + ": weight " + std::to_string(i) +
                              " is negative or not finite");
    }
    sum += w[i];
  }
  if (sum > 1.0 + kExactTolerance) {
    throw PreconditionError(what + ": weights sum to " + std::to_string(sum) + " > 1");
  }
}

HorizonReport summarize(const DriftSequence& d, std::vector<std::size_t> r) {
  HorizonReport report;
  report.m.assign(d.index().begin(), d.index().end());
  for (std::size_t i = 0; i < d.size(); ++i) {
    report.r.emplace_back(r[i]);
    report.products.push_back(static_cast<double>(r[i]) * d.values()[i]);
  }
  for (std::size_t i = 1; i < report.products.size(); ++i) {
    if (report.products[i] > report.products[i - 1]) report.nonincreasing = false;
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < report.products.size(); ++i) {
    if (report.m[i] > 0 && report.products[i] > 0.0) {
      xs.push_back(std::log(static_cast<double>(report.m[i])));
      ys.push_back(std::log(report.products[i]));
    }
  }
  if (xs.empty()) {
    report.decays = true;
    return report;
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  report.log_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  report.decays = report.log_slope < 0.0 &&
                  report.products.back() <= report.products.front();
  return report;
}

}  // namespace

TreeProcess cumulative_product(const TreeProcess& factors) {
  if (!factors.nonnegative()) {
    for (NodeId v = factors.tree().level_begin(factors.origin());
         v < factors.tree().node_count(); ++v) {
      if (factors[v] < 0.0) {
        throw PreconditionError("negative factor at node " + std::to_string(v));
      }
    }
  }
  const OutcomeTree& tree = factors.tree();
  std::vector<double> e(tree.node_count(), kNaN);
  for (NodeId v : tree.nodes_at(factors.origin())) e[v] = factors[v];
  for (std::size_t level = factors.origin() + 1; level <= tree.depth(); ++level) {
    for (NodeId v : tree.nodes_at(level)) {
      const double prev = e[tree.parent(v)];
      e[v] = prev == 0.0 ? 0.0 : prev * factors[v];
    }
  }
  return TreeProcess(factors.tree_ptr(), std::move(e), factors.origin());
}

std::vector<double> factor_excess(const MeasureFamily& family, std::size_t measure,
                                  const TreeProcess& factors, std::size_t n) {
  auto cond = conditional_expectation(family, measure, factors, factors.origin() + n);
  for (double& x : cond.values) x -= 1.0;
  return std::move(cond.values);
}

double max_conditional_excess(const MeasureFamily& family, const TreeProcess& factors) {
  double worst = -kInfinity;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto path = family.path_probabilities(k);
    for (std::size_t n = 0; n < factors.horizon_capacity(); ++n) {
      const auto eta = factor_excess(family, k, factors, n);
      const NodeId first = factors.tree().level_begin(factors.origin() + n);
      for (std::size_t i = 0; i < eta.size(); ++i) {
        if (path[first + i] > 0.0) worst = std::max(worst, eta[i]);
      }
    }
  }
  return worst;
}

HorizonReport horizon_from_drift(const DriftSequence& d, PowerRule rule) {
  if (!(rule.exponent > 0.0 && rule.exponent < 1.0)) {
    throw RangeError("horizon exponent must lie in (0, 1), got " +
                     std::to_string(rule.exponent));
  }
  if (!(rule.scale > 0.0) || !std::isfinite(rule.scale)) {
    throw RangeError("horizon scale must be positive");
  }
  return horizon_from_drift(d, [rule](std::size_t m) { return power_horizon(rule, m); });
}

std::size_t power_horizon(PowerRule rule, std::size_t m) {
  const double r = std::floor(rule.scale * std::pow(static_cast<double>(m), rule.exponent));
  return std::max<std::size_t>(1, static_cast<std::size_t>(r));
}

HorizonReport horizon_from_drift(const DriftSequence& d,
                                 const std::function<std::size_t(std::size_t)>& rule) {
  std::vector<std::size_t> r;
  for (std::size_t m : d.index()) r.push_back(rule(m));
  return summarize(d, std::move(r));
}

std::vector<double> diagonal_product(const TreeProcess& diagonal, std::size_t m,
                                     std::size_t n) {
  const std::size_t level = std::max(m, n);
  if (level > diagonal.tree().depth()) {
    throw RangeError("diagonal product needs level " + std::to_string(level) +
                     " of a depth-" + std::to_string(diagonal.tree().depth()) + " tree");
  }
  const TreeProcess e = cumulative_product(diagonal);
  const auto values = e.level(level);
  return {values.begin(), values.end()};
}

TreeProcess diagonal_row(const TreeProcess& diagonal, std::size_t m) {
  if (diagonal.origin() != 0) throw PreconditionError("diagonal factors must start at the root");
  const TreeProcess e = cumulative_product(diagonal);
  return TreeProcess(e.tree_ptr(), {e.values().begin(), e.values().end()}, m);
}

void WeightArray::validate() const {
  for (std::size_t m = 0; m < w.size(); ++m) {
    validate_weights(w[m], "weight row " + std::to_string(m));
  }
}

std::span<const double> WeightArray::row(std::size_t m) const {
  if (m >= w.size()) throw RangeError("no weight row " + std::to_string(m));
  return w[m];
}

TreeProcess time_mixture(std::span<const double> w, const TreeProcess& factors) {
  validate_weights(w, "mixture weights");
  if (!factors.nonnegative()) throw PreconditionError("mixture factors must be nonnegative");
  const OutcomeTree& tree = factors.tree();
  auto weight = [&](std::size_t i) { return i < w.size() ? w[i] : 0.0; };

  std::vector<double> e(tree.node_count(), kNaN);
  for (NodeId v : tree.nodes_at(factors.origin())) e[v] = weighted(weight(0), factors[v]);
  for (std::size_t n = 1; n <= factors.horizon_capacity(); ++n) {
    for (NodeId v : tree.nodes_at(factors.origin() + n)) {
      e[v] = e[tree.parent(v)] + weighted(weight(n), factors[v]);
    }
  }
  return TreeProcess(factors.tree_ptr(), std::move(e), factors.origin());
}

std::vector<double> factor_excess_means(const MeasureFamily& family, std::size_t measure,
                                        const TreeProcess& factors, std::size_t upto) {
  std::vector<double> eps;
  for (std::size_t i = 0; i <= upto; ++i) {
    eps.push_back(expectation(family, measure, factors, factors.origin() + i) - 1.0);
  }
  return eps;
}

double mixture_bound(std::span<const double> w, std::span<const double> eps,
                     std::size_t rho) {
  double bound = 1.0;
  for (std::size_t i = 0; i <= rho && i < w.size(); ++i) {
    if (i >= eps.size()) {
      throw RangeError("no excess for factor " + std::to_string(i));
    }
    bound += w[i] * eps[i];
  }
  return bound;
}

}  // namespace aep
