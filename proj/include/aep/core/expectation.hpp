#pragma once

#include <cstddef>
#include <vector>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"

namespace aep {

// E_P[X_n]: path-probability weighted sum over the level-n nodes. Outcomes of
// probability zero are skipped, so an infinite value only matters when it
// carries mass.
double expectation(const MeasureFamily& family, std::size_t measure,
                   const TreeProcess& x, std::size_t level);

struct ConditionalExpectation {
  std::size_t level = 0;
  // One value per node of `level`, in node order.
  std::vector<double> values;
  // Nodes of zero path probability; their value is the plain average of the
  // children (any version of the conditional expectation is valid there).
  std::vector<NodeId> off_support;
};

// E_P[X_{level+1} | F_level] as a function on the level-`level` nodes.
ConditionalExpectation conditional_expectation(const MeasureFamily& family,
                                               std::size_t measure,
                                               const TreeProcess& x,
                                               std::size_t level);

// Weighted contribution p * x with the convention 0 * inf = 0.
inline double weighted(double probability, double value) {
  return probability == 0.0 ? 0.0 : probability * value;
}

void require_same_tree(const MeasureFamily& family, const TreeProcess& x);

}  // namespace aep
