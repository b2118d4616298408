#include "aep/verifier/snell.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "aep/core/error.hpp"
#include "aep/core/expectation.hpp"

namespace aep {

TreeProcess snell_envelope_bounded(const MeasureFamily& family, std::size_t measure,
                                   const TreeProcess& row, std::size_t r) {
  require_same_tree(family, row);
  if (r > row.horizon_capacity()) {
    throw RangeError("envelope horizon " + std::to_string(r) + " beyond row capacity " +
                     std::to_string(row.horizon_capacity()));
  }
  const OutcomeTree& tree = row.tree();
  const auto path = family.path_probabilities(measure);
  const auto& branch = family.measure(measure).branch;

  std::vector<double> l(row.values().begin(), row.values().end());
  for (std::size_t level = row.origin() + r; level-- > row.origin();) {
    for (NodeId v : tree.nodes_at(level)) {
      double next = 0.0;
      if (path[v] == 0.0) {
        for (NodeId c : tree.children(v)) next += l[c];
        next /= static_cast<double>(tree.child_count(v));
      } else {
        for (NodeId c : tree.children(v)) next += weighted(branch[c], l[c]);
      }
      l[v] = std::max(row[v], next);
    }
  }
  return TreeProcess(row.tree_ptr(), std::move(l), row.origin());
}

double envelope_value(const MeasureFamily& family, std::size_t measure,
                      const TreeProcess& row, std::size_t r) {
  const TreeProcess l = snell_envelope_bounded(family, measure, row, r);
  const auto path = family.path_probabilities(measure);
  double total = 0.0;
  for (NodeId v : row.tree().nodes_at(row.origin())) total += weighted(path[v], l[v]);
  return total;
}

}  // namespace aep
