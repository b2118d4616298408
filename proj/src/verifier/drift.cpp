#include "aep/verifier/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aep/core/error.hpp"
#include "aep/core/expectation.hpp"

namespace aep {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t checked_level(const TreeProcess& row, std::size_t n) {
  if (n + 1 > row.horizon_capacity()) {
    throw RangeError("drift at row time " + std::to_string(n) + " needs row time " +
                     std::to_string(n + 1) + " but the row has capacity " +
                     std::to_string(row.horizon_capacity()));
  }
  return row.origin() + n;
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

const MeasureFamily& family_for_row(std::span<const MeasureFamily> families,
                                    std::size_t m) {
  if (families.empty()) throw PreconditionError("no measure family given");
  if (families.size() == 1) return families.front();
  if (m >= families.size()) {
    throw PreconditionError("no measure family for row " + std::to_string(m));
  }
  return families[m];
}

std::vector<double> drift_delta(const MeasureFamily& family, std::size_t measure,
                                const TreeProcess& row, std::size_t n) {
  const std::size_t level = checked_level(row, n);
  auto cond = conditional_expectation(family, measure, row, level);
  const auto current = row.level(level);
  for (std::size_t i = 0; i < cond.values.size(); ++i) cond.values[i] -= current[i];
  return std::move(cond.values);
}

double expected_positive_drift(const MeasureFamily& family, std::size_t measure,
                               const TreeProcess& row, std::size_t n) {
  const auto delta = drift_delta(family, measure, row, n);
  const auto path = family.path_probabilities(measure);
  const NodeId first = row.tree().level_begin(row.origin() + n);
  double total = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double p = path[first + i];
    if (p == 0.0) continue;
    if (!std::isfinite(delta[i])) return kInfinity;
    total += p * positive_part(delta[i]);
  }
  return total;
}

double drift_excess_sum(const MeasureFamily& family, std::size_t measure,
                        const TreeProcess& row, std::size_t r) {
  double total = 0.0;
  for (std::size_t n = 0; n < r; ++n) {
    total += expected_positive_drift(family, measure, row, n);
  }
  return total;
}

std::vector<double> asp_excess(std::span<const MeasureFamily> families,
                               const BiProcess& e, std::size_t n) {
  std::vector<double> out;
  out.reserve(e.size());
  for (std::size_t m = 0; m < e.size(); ++m) {
    const MeasureFamily& family = family_for_row(families, m);
    double worst = 0.0;
    for (std::size_t k = 0; k < family.size(); ++k) {
      worst = std::max(worst, expected_positive_drift(family, k, e.row(m), n));
    }
    out.push_back(worst);
  }
  return out;
}

DoobParts doob_decompose(const MeasureFamily& family, std::size_t measure,
                         const TreeProcess& row) {
  require_same_tree(family, row);
  if (!row.finite()) throw PreconditionError("Doob decomposition of a non-finite row");
  const OutcomeTree& tree = row.tree();
  const std::size_t origin = row.origin();

  std::vector<double> a(tree.node_count(), kNaN);
  std::vector<double> plus(tree.node_count(), kNaN);
  for (NodeId v : tree.nodes_at(origin)) a[v] = plus[v] = 0.0;

  std::vector<std::vector<double>> delta;
  for (std::size_t n = 0; n < row.horizon_capacity(); ++n) {
    auto d = drift_delta(family, measure, row, n);
    const NodeId first = tree.level_begin(origin + n);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const NodeId v = first + i;
      for (NodeId c : tree.children(v)) {
        a[c] = a[v] + d[i];
        plus[c] = plus[v] + positive_part(d[i]);
      }
    }
    delta.push_back(std::move(d));
  }

  std::vector<double> mart(tree.node_count(), kNaN);
  for (NodeId v = tree.level_begin(origin); v < tree.node_count(); ++v) {
    mart[v] = row[v] - a[v];
  }
  return DoobParts{TreeProcess(row.tree_ptr(), std::move(mart), origin),
                   TreeProcess(row.tree_ptr(), std::move(a), origin), std::move(delta),
                   TreeProcess(row.tree_ptr(), std::move(plus), origin)};
}

double martingale_defect(const MeasureFamily& family, std::size_t measure,
                         const TreeProcess& x) {
  const auto path = family.path_probabilities(measure);
  double worst = 0.0;
  for (std::size_t n = 0; n < x.horizon_capacity(); ++n) {
    const auto d = drift_delta(family, measure, x, n);
    const NodeId first = x.tree().level_begin(x.origin() + n);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (path[first + i] > 0.0) worst = std::max(worst, std::abs(d[i]));
    }
  }
  return worst;
}

std::optional<NodeId> supermartingale_violation(const MeasureFamily& family,
                                                const TreeProcess& x,
                                                double tolerance) {
  for (std::size_t n = 0; n < x.horizon_capacity(); ++n) {
    const NodeId first = x.tree().level_begin(x.origin() + n);
    for (std::size_t k = 0; k < family.size(); ++k) {
      const auto path = family.path_probabilities(k);
      const auto d = drift_delta(family, k, x, n);
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (path[first + i] > 0.0 && !(d[i] <= tolerance)) return first + i;
      }
    }
  }
  return std::nullopt;
}

double l1_distance(const MeasureFamily& family, std::size_t measure,
                   const TreeProcess& x, const TreeProcess& y, std::size_t level) {
  require_same_tree(family, x);
  require_same_tree(family, y);
  const auto path = family.path_probabilities(measure);
  const auto xs = x.level(level);
  const auto ys = y.level(level);
  const NodeId first = x.tree().level_begin(level);
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    total += weighted(path[first + i], std::abs(xs[i] - ys[i]));
  }
  return total;
}

}  // namespace aep
