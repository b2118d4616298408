#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aep/core/tree.hpp"

namespace aep {

inline constexpr double kExactTolerance = 1e-12;

// Branch probabilities of one measure: branch[v] is the probability of the
// edge parent(v) -> v. The root entry is 1.
struct Measure {
  std::string label;
  std::vector<double> branch;
};

// A finite stand-in for the null family: several measures sharing one tree
// topology, so adaptedness and stopping times do not depend on the measure.
class MeasureFamily {
 public:
  MeasureFamily(TreePtr tree, std::vector<Measure> measures);

  const OutcomeTree& tree() const { return *tree_; }
  const TreePtr& tree_ptr() const { return tree_; }
  std::size_t size() const { return measures_.size(); }
  const Measure& measure(std::size_t k) const { return measures_.at(k); }
  const std::string& label(std::size_t k) const { return measure(k).label; }

  // Probability of reaching each node, indexed by node id.
  std::span<const double> path_probabilities(std::size_t k) const {
    return path_probability_.at(k);
  }

 private:
  TreePtr tree_;
  std::vector<Measure> measures_;
  std::vector<std::vector<double>> path_probability_;
};

// Equal branch probabilities at every node.
Measure uniform_measure(const OutcomeTree& tree, std::string label = "uniform");

// The same child-probability vector at every node, which requires constant
// branching. Convenient for i.i.d. coin trees.
Measure iid_measure(const OutcomeTree& tree, std::span<const double> child_probs,
                    std::string label);

}  // namespace aep
