#include "aep/core/stopping.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "aep/core/error.hpp"
#include "aep/core/expectation.hpp"

namespace aep {
namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

void check_levels(const OutcomeTree& tree, std::size_t horizon, std::size_t first_level) {
  if (horizon > tree.depth()) {
    throw RangeError("stopping horizon " + std::to_string(horizon) +
                     " beyond tree depth " + std::to_string(tree.depth()));
  }
  if (first_level > horizon) {
    throw RangeError("first stopping level " + std::to_string(first_level) +
                     " after horizon " + std::to_string(horizon));
  }
}

// Per-node counts for levels first_level..horizon, indexed by node id.
std::vector<std::uint64_t> node_counts(const OutcomeTree& tree, std::size_t horizon,
                                       std::size_t first_level) {
  std::vector<std::uint64_t> count(tree.node_count(), 0);
  for (NodeId v : tree.nodes_at(horizon)) count[v] = 1;
  for (std::size_t n = horizon; n-- > first_level;) {
    for (NodeId v : tree.nodes_at(n)) {
      std::uint64_t product = 1;
      for (NodeId c : tree.children(v)) product = saturating_mul(product, count[c]);
      count[v] = saturating_add(product, 1);
    }
  }
  return count;
}

using StopSets = std::vector<std::vector<NodeId>>;

StopSets subtree_sets(const OutcomeTree& tree, NodeId v, std::size_t horizon) {
  StopSets out;
  out.push_back({v});
  if (tree.level_of(v) == horizon) return out;

  std::vector<StopSets> per_child;
  for (NodeId c : tree.children(v)) per_child.push_back(subtree_sets(tree, c, horizon));

  std::vector<std::size_t> digit(per_child.size(), 0);
  while (true) {
    std::vector<NodeId> combined;
    for (std::size_t i = 0; i < per_child.size(); ++i) {
      const auto& part = per_child[i][digit[i]];
      combined.insert(combined.end(), part.begin(), part.end());
    }
    out.push_back(std::move(combined));

    std::size_t i = 0;
    while (i < digit.size() && ++digit[i] == per_child[i].size()) digit[i++] = 0;
    if (i == digit.size()) break;
  }
  return out;
}

}  // namespace

void validate(const OutcomeTree& tree, const StoppingTime& tau) {
  check_levels(tree, tau.horizon, tau.first_level);
  if (!std::is_sorted(tau.stops.begin(), tau.stops.end())) {
    throw PreconditionError("stop nodes are not sorted");
  }
  std::vector<char> is_stop(tree.node_count(), 0);
  for (NodeId v : tau.stops) {
    if (v >= tree.node_count()) {
      throw PreconditionError("stop node " + std::to_string(v) + " not in tree");
    }
    const std::size_t level = tree.level_of(v);
    if (level < tau.first_level || level > tau.horizon) {
      throw PreconditionError("stop node " + std::to_string(v) + " at level " +
                              std::to_string(level) + " outside [" +
                              std::to_string(tau.first_level) + ", " +
                              std::to_string(tau.horizon) + "]");
    }
    if (is_stop[v]) {
      throw PreconditionError("stop node " + std::to_string(v) + " listed twice");
    }
    is_stop[v] = 1;
  }
  // Every node at the horizon must have exactly one stop node on its path.
  for (NodeId leaf : tree.nodes_at(tau.horizon)) {
    int hits = 0;
    for (std::size_t n = tau.first_level; n <= tau.horizon; ++n) {
      if (is_stop[tree.ancestor_at(leaf, n)]) ++hits;
    }
    if (hits != 1) {
      throw PreconditionError("path to node " + std::to_string(leaf) + " meets " +
                              std::to_string(hits) + " stop nodes");
    }
  }
}

StoppingTime constant_time(const OutcomeTree& tree, std::size_t level) {
  StoppingTime tau;
  tau.horizon = level;
  tau.first_level = level;
  for (NodeId v : tree.nodes_at(level)) tau.stops.push_back(v);
  return tau;
}

std::uint64_t count_stopping_times(const OutcomeTree& tree, std::size_t horizon,
                                   std::size_t first_level) {
  check_levels(tree, horizon, first_level);
  const auto count = node_counts(tree, horizon, first_level);
  std::uint64_t total = 1;
  for (NodeId v : tree.nodes_at(first_level)) total = saturating_mul(total, count[v]);
  return total;
}

void for_each_stopping_time(const OutcomeTree& tree, std::size_t horizon,
                            std::size_t first_level, std::uint64_t cap,
                            const std::function<void(const StoppingTime&)>& visit) {
  const std::uint64_t total = count_stopping_times(tree, horizon, first_level);
  if (total > cap) {
    throw EnumerationLimit(std::to_string(total) + " stopping times exceed the cap of " +
                           std::to_string(cap));
  }

  std::vector<StopSets> per_node;
  for (NodeId v : tree.nodes_at(first_level)) per_node.push_back(subtree_sets(tree, v, horizon));

  StoppingTime tau;
  tau.horizon = horizon;
  tau.first_level = first_level;
  std::vector<std::size_t> digit(per_node.size(), 0);
  while (true) {
    tau.stops.clear();
    for (std::size_t i = 0; i < per_node.size(); ++i) {
      const auto& part = per_node[i][digit[i]];
      tau.stops.insert(tau.stops.end(), part.begin(), part.end());
    }
    std::sort(tau.stops.begin(), tau.stops.end());
    visit(tau);

    std::size_t i = 0;
    while (i < digit.size() && ++digit[i] == per_node[i].size()) digit[i++] = 0;
    if (i == digit.size()) break;
  }
}

std::vector<StoppingTime> enumerate_stopping_times(const OutcomeTree& tree,
                                                   std::size_t horizon,
                                                   std::size_t first_level,
                                                   std::uint64_t cap) {
  std::vector<StoppingTime> out;
  for_each_stopping_time(tree, horizon, first_level, cap,
                         [&](const StoppingTime& tau) { out.push_back(tau); });
  return out;
}

double stopped_expectation(const MeasureFamily& family, std::size_t measure,
                           const TreeProcess& x, const StoppingTime& tau) {
  require_same_tree(family, x);
  const OutcomeTree& tree = x.tree();
  if (tau.horizon > tree.depth()) {
    throw RangeError("stopping horizon " + std::to_string(tau.horizon) +
                     " beyond process depth " + std::to_string(tree.depth()));
  }
  if (tau.first_level < x.origin()) {
    throw RangeError("stopping time may stop before the process origin");
  }
  const auto path = family.path_probabilities(measure);
  double total = 0.0;
  for (NodeId v : tau.stops) total += weighted(path[v], x[v]);
  return total;
}

}  // namespace aep
