#include "aep/verifier/sampling.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "aep/core/error.hpp"
#include "aep/core/expectation.hpp"
#include "aep/verifier/drift.hpp"

namespace aep {

SamplingReport optional_sampling_check(const MeasureFamily& family, const TreeProcess& s,
                                       std::size_t horizon, std::uint64_t cap) {
  require_same_tree(family, s);
  if (!s.nonnegative()) throw PreconditionError("optional sampling needs a nonnegative process");
  if (horizon > s.horizon_capacity()) {
    throw RangeError("horizon " + std::to_string(horizon) + " beyond row capacity " +
                     std::to_string(s.horizon_capacity()));
  }
  if (auto v = supermartingale_violation(family, s)) {
    throw PreconditionError("not a supermartingale: positive drift at node " +
                            std::to_string(*v) + " (level " +
                            std::to_string(s.tree().level_of(*v)) + ")");
  }
  std::vector<double> start;
  for (std::size_t k = 0; k < family.size(); ++k) {
    start.push_back(expectation(family, k, s, s.origin()));
  }

  SamplingReport report;
  bool have = false;
  for_each_stopping_time(
      s.tree(), s.origin() + horizon, s.origin(), cap, [&](const StoppingTime& tau) {
        ++report.stopping_times_checked;
        for (std::size_t k = 0; k < family.size(); ++k) {
          const double diff = stopped_expectation(family, k, s, tau) - start[k];
          if (diff > kExactTolerance) ++report.violations;
          if (!have || diff > report.max_difference) {
            have = true;
            report.max_difference = diff;
            report.worst_measure = k;
            report.argmax = tau;
          }
        }
      });
  return report;
}

StoppingTime first_crossing_time(const TreeProcess& row, std::size_t horizon,
                                 double threshold) {
  if (horizon > row.horizon_capacity()) {
    throw RangeError("horizon " + std::to_string(horizon) + " beyond row capacity " +
                     std::to_string(row.horizon_capacity()));
  }
  const OutcomeTree& tree = row.tree();
  StoppingTime tau;
  tau.first_level = row.origin();
  tau.horizon = row.origin() + horizon;
  std::vector<NodeId> pending;
  for (NodeId v : tree.nodes_at(row.origin())) pending.push_back(v);
  while (!pending.empty()) {
    const NodeId v = pending.back();
    pending.pop_back();
    if (tree.level_of(v) == tau.horizon || row[v] >= threshold) {
      tau.stops.push_back(v);
    } else {
      for (NodeId c : tree.children(v)) pending.push_back(c);
    }
  }
  std::sort(tau.stops.begin(), tau.stops.end());
  return tau;
}

VilleBound ville_bound_exact(const MeasureFamily& family, const TreeProcess& row,
                             std::size_t rho, double alpha) {
  require_same_tree(family, row);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw RangeError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const double threshold = 1.0 / alpha;
  const StoppingTime tau = first_crossing_time(row, rho, threshold);

  VilleBound worst;
  bool have = false;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto path = family.path_probabilities(k);
    VilleBound b;
    b.measure = k;
    for (NodeId v : tau.stops) {
      if (row[v] >= threshold) b.lhs += path[v];
    }
    b.rhs = alpha * stopped_expectation(family, k, row, tau);
    b.holds = b.lhs <= b.rhs + kExactTolerance;
    if (!have || b.lhs - b.rhs > worst.lhs - worst.rhs) {
      have = true;
      worst = b;
    }
  }
  return worst;
}

}  // namespace aep
