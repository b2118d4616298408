#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <ranges>
#include <span>
#include <vector>

namespace aep {

using NodeId = std::size_t;

inline constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();

// A finite rooted tree whose levels realize a filtration: the sigma-algebra at
// time n is generated by the level-n nodes. Node ids are assigned level by
// level, and the children of a node are contiguous and ordered like their
// parents. Immutable once built; share it through TreePtr.
class OutcomeTree {
 public:
  // child_counts[n][i] is the number of children of the i-th node of level n.
  // The outer size is the depth; level 0 always holds the single root.
  explicit OutcomeTree(std::vector<std::vector<std::size_t>> child_counts);

  std::size_t depth() const { return child_counts_.size(); }
  std::size_t node_count() const { return level_.size(); }
  std::size_t level_size(std::size_t n) const;

  NodeId level_begin(std::size_t n) const;
  NodeId level_end(std::size_t n) const;
  auto nodes_at(std::size_t n) const {
    return std::views::iota(level_begin(n), level_end(n));
  }

  std::size_t level_of(NodeId v) const { return level_.at(v); }
  NodeId parent(NodeId v) const { return parent_.at(v); }
  std::size_t child_count(NodeId v) const { return child_count_.at(v); }
  NodeId first_child(NodeId v) const { return first_child_.at(v); }
  auto children(NodeId v) const {
    return std::views::iota(first_child(v), first_child(v) + child_count(v));
  }
  bool is_leaf(NodeId v) const { return child_count(v) == 0; }

  // Ancestor of v at the given level (v itself when level == level_of(v)).
  NodeId ancestor_at(NodeId v, std::size_t level) const;
  bool is_ancestor(NodeId a, NodeId v) const;

  const std::vector<std::vector<std::size_t>>& child_counts() const {
    return child_counts_;
  }

  bool operator==(const OutcomeTree& other) const {
    return child_counts_ == other.child_counts_;
  }

 private:
  std::vector<std::vector<std::size_t>> child_counts_;
  std::vector<NodeId> level_offset_;
  std::vector<std::size_t> level_;
  std::vector<NodeId> parent_;
  std::vector<NodeId> first_child_;
  std::vector<std::size_t> child_count_;
};

using TreePtr = std::shared_ptr<const OutcomeTree>;

// Uniform branching: every node of level n has per_level[n] children.
TreePtr build_tree(std::span<const std::size_t> per_level);

// Explicit per-node child counts, see OutcomeTree.
TreePtr build_tree(std::vector<std::vector<std::size_t>> child_counts);

bool same_tree(const TreePtr& a, const TreePtr& b);

}  // namespace aep
