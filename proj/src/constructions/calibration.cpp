#include "aep/constructions/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aep/core/error.hpp"

namespace aep {

Calibrator::Calibrator(double kappa, std::optional<double> cap) : kappa_(kappa), cap_(cap) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw RangeError("calibrator kappa must lie in (0, 1), got " + std::to_string(kappa));
  }
  if (cap && !(*cap > 0.0 && std::isfinite(*cap))) {
    throw RangeError("calibrator cap must be positive and finite");
  }
  const double mass = quadrature_mass();
  if (mass > 1.0 + kQuadratureTolerance) {
    throw PreconditionError("calibrator integrates to " + std::to_string(mass) + " > 1");
  }
}

Calibrator Calibrator::power(double kappa) { return Calibrator(kappa, std::nullopt); }

Calibrator Calibrator::truncated_power(double kappa, double cap) {
  return Calibrator(kappa, cap);
}

double Calibrator::operator()(double p) const {
  if (!(p >= 0.0)) throw RangeError("p-value must be nonnegative, got " + std::to_string(p));
  if (p > 1.0) return 0.0;
  const double f = p == 0.0 ? kInfinity : kappa_ * std::pow(p, kappa_ - 1.0);
  return cap_ ? std::min(f, *cap_) : f;
}

double Calibrator::quadrature_mass(std::size_t grid) const {
  const double h = 1.0 / static_cast<double>(grid);
  double total = 0.0;
  for (std::size_t j = 0; j < grid; ++j) {
    total += (*this)((static_cast<double>(j) + 0.5) * h);
  }
  return total * h;
}

void PArray::validate() const {
  if (!index.empty() && index.size() != rows.size()) {
    throw PreconditionError("p-array has " + std::to_string(rows.size()) + " rows but " +
                            std::to_string(index.size()) + " indices");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].nonnegative() || !rows[i].finite()) {
      throw PreconditionError("p-array row " + std::to_string(i) +
                              " has negative or infinite entries");
    }
  }
}

Calibrated calibrate(const PArray& p, const Calibrator& f) {
  p.validate();
  std::vector<TreeProcess> rows;
  std::vector<bool> non_integrable;
  for (const TreeProcess& row : p.rows) {
    std::vector<double> values(row.values().begin(), row.values().end());
    for (NodeId v = row.tree().level_begin(row.origin()); v < values.size(); ++v) {
      values[v] = f(values[v]);
    }
    rows.emplace_back(row.tree_ptr(), std::move(values), row.origin());
    non_integrable.push_back(!rows.back().finite());
  }
  std::vector<std::size_t> index = p.index;
  if (index.empty()) {
    for (std::size_t i = 0; i < p.rows.size(); ++i) index.push_back(i);
  }
  return Calibrated{BiProcess(std::move(rows)), std::move(index), std::move(non_integrable)};
}

namespace {

template <class Pick>
std::vector<double> reduce_paths(const PArray& p, std::size_t row, Pick pick) {
  if (row >= p.rows.size()) throw RangeError("p-array has no row " + std::to_string(row));
  const TreeProcess& x = p.rows[row];
  const OutcomeTree& tree = x.tree();
  std::vector<double> acc(tree.node_count(), 0.0);
  for (NodeId v : tree.nodes_at(x.origin())) acc[v] = x[v];
  for (std::size_t level = x.origin() + 1; level <= tree.depth(); ++level) {
    for (NodeId v : tree.nodes_at(level)) acc[v] = pick(acc[tree.parent(v)], x[v]);
  }
  std::vector<double> out;
  for (NodeId v : tree.nodes_at(tree.depth())) out.push_back(std::min(acc[v], kPCap));
  return out;
}

}  // namespace

std::vector<double> supremum_p(const PArray& p, std::size_t row) {
  return reduce_paths(p, row, [](double a, double b) { return std::max(a, b); });
}

std::vector<double> infimum_p(const PArray& p, std::size_t row) {
  return reduce_paths(p, row, [](double a, double b) { return std::min(a, b); });
}

double WeightedSample::cdf(double x) const {
  if (values.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= x) total += weights.empty() ? 1.0 : weights[i];
  }
  return weights.empty() ? total / static_cast<double>(values.size()) : total;
}

WeightedSample leaf_sample(const MeasureFamily& family, std::size_t measure,
                           std::vector<double> values) {
  const OutcomeTree& tree = family.tree();
  const std::size_t last = tree.depth();
  if (values.size() != tree.level_size(last)) {
    throw PreconditionError("leaf sample has " + std::to_string(values.size()) +
                            " values for " + std::to_string(tree.level_size(last)) +
                            " leaves");
  }
  const auto path = family.path_probabilities(measure);
  WeightedSample out;
  out.values = std::move(values);
  for (NodeId v : tree.nodes_at(last)) out.weights.push_back(path[v]);
  return out;
}

StrongPReport check_strong_p(std::span<const WeightedSample> q,
                             std::span<const std::size_t> m,
                             std::span<const double> alpha,
                             const ToleranceSchedule& schedule) {
  if (q.size() != m.size()) throw PreconditionError("one sample per index is required");
  for (double a : alpha) {
    if (!(a > 0.0 && a < 1.0)) {
      throw RangeError("alpha grid entries must lie in (0, 1), got " + std::to_string(a));
    }
  }
  StrongPReport report;
  report.m.assign(m.begin(), m.end());
  report.alpha.assign(alpha.begin(), alpha.end());
  for (const WeightedSample& sample : q) {
    std::vector<double> cdf;
    std::vector<bool> weak;
    double ratio = 0.0;
    for (double a : alpha) {
      const double c = sample.cdf(a);
      cdf.push_back(c);
      weak.push_back(c <= a + kExactTolerance);
      ratio = std::max(ratio, c / a);
    }
    report.cdf.push_back(std::move(cdf));
    report.weak_pass.push_back(std::move(weak));
    report.strong_ratio.push_back(ratio);
  }
  report.strong = trend_from_values(report.m, report.strong_ratio, schedule);
  return report;
}

}  // namespace aep
