#include "aep/core/expectation.hpp"

#include <string>

#include "aep/core/error.hpp"

namespace aep {

void require_same_tree(const MeasureFamily& family, const TreeProcess& x) {
  if (!same_tree(family.tree_ptr(), x.tree_ptr())) {
    throw PreconditionError("process and measure family live on different trees");
  }
}

double expectation(const MeasureFamily& family, std::size_t measure,
                   const TreeProcess& x, std::size_t level) {
  require_same_tree(family, x);
  if (level > x.tree().depth()) {
    throw RangeError("expectation at level " + std::to_string(level) +
                     " beyond depth " + std::to_string(x.tree().depth()));
  }
  if (!x.observed(level)) {
    throw RangeError("expectation at level " + std::to_string(level) +
                     " before process origin " + std::to_string(x.origin()));
  }
  const auto path = family.path_probabilities(measure);
  double total = 0.0;
  for (NodeId v : x.tree().nodes_at(level)) total += weighted(path[v], x[v]);
  return total;
}

ConditionalExpectation conditional_expectation(const MeasureFamily& family,
                                               std::size_t measure,
                                               const TreeProcess& x,
                                               std::size_t level) {
  require_same_tree(family, x);
  const OutcomeTree& tree = x.tree();
  if (level + 1 > tree.depth()) {
    throw RangeError("conditional expectation of level " + std::to_string(level + 1) +
                     " beyond depth " + std::to_string(tree.depth()));
  }
  if (!x.observed(level + 1)) {
    throw RangeError("conditional expectation of unobserved level " +
                     std::to_string(level + 1));
  }
  const auto path = family.path_probabilities(measure);
  const auto& branch = family.measure(measure).branch;

  ConditionalExpectation out;
  out.level = level;
  out.values.reserve(tree.level_size(level));
  for (NodeId v : tree.nodes_at(level)) {
    double value = 0.0;
    if (path[v] == 0.0) {
      for (NodeId c : tree.children(v)) value += x[c];
      value /= static_cast<double>(tree.child_count(v));
      out.off_support.push_back(v);
    } else {
      for (NodeId c : tree.children(v)) value += weighted(branch[c], x[c]);
    }
    out.values.push_back(value);
  }
  return out;
}

}  // namespace aep
