#include "aep/core/measure.hpp"

#include <cmath>

#include "aep/core/error.hpp"

namespace aep {

MeasureFamily::MeasureFamily(TreePtr tree, std::vector<Measure> measures)
    : tree_(std::move(tree)), measures_(std::move(measures)) {
  if (!tree_) throw InvalidMeasure("measure family without a tree");
  if (measures_.empty()) throw InvalidMeasure("measure family is empty");

  const OutcomeTree& t = *tree_;
  for (const Measure& mu : measures_) {
    if (mu.branch.size() != t.node_count()) {
      throw InvalidMeasure("measure '" + mu.label + "' has " +
                           std::to_string(mu.branch.size()) +
                           " branch weights for " +
                           std::to_string(t.node_count()) + " nodes");
    }
    for (NodeId v = 1; v < t.node_count(); ++v) {
      const double w = mu.branch[v];
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidMeasure("measure '" + mu.label +
                             "' has an invalid weight on the edge into node " +
                             std::to_string(v));
      }
    }
    for (std::size_t n = 0; n < t.depth(); ++n) {
      for (NodeId v : t.nodes_at(n)) {
        double total = 0.0;
        for (NodeId c : t.children(v)) total += mu.branch[c];
        if (std::abs(total - 1.0) > kExactTolerance) {
          throw InvalidMeasure("measure '" + mu.label +
                               "': branch probabilities below node " +
                               std::to_string(v) + " sum to " +
                               std::to_string(total));
        }
      }
    }

    std::vector<double> path(t.node_count(), 0.0);
    path[0] = 1.0;
    for (NodeId v = 1; v < t.node_count(); ++v) {
      path[v] = path[t.parent(v)] * mu.branch[v];
    }
    path_probability_.push_back(std::move(path));
  }
}

Measure uniform_measure(const OutcomeTree& tree, std::string label) {
  Measure mu{std::move(label), std::vector<double>(tree.node_count(), 1.0)};
  for (NodeId v = 1; v < tree.node_count(); ++v) {
    mu.branch[v] = 1.0 / static_cast<double>(tree.child_count(tree.parent(v)));
  }
  return mu;
}

Measure iid_measure(const OutcomeTree& tree, std::span<const double> child_probs,
                    std::string label) {
  Measure mu{std::move(label), std::vector<double>(tree.node_count(), 1.0)};
  for (NodeId v = 0; v < tree.node_count(); ++v) {
    if (tree.is_leaf(v)) continue;
    if (tree.child_count(v) != child_probs.size()) {
      throw InvalidMeasure("iid measure needs " +
                           std::to_string(child_probs.size()) +
                           " children at node " + std::to_string(v));
    }
    std::size_t i = 0;
    for (NodeId c : tree.children(v)) mu.branch[c] = child_probs[i++];
  }
  return mu;
}

}  // namespace aep
