#include "aep/core/tree.hpp"

#include <string>

#include "aep/core/error.hpp"

namespace aep {

OutcomeTree::OutcomeTree(std::vector<std::vector<std::size_t>> child_counts)
    : child_counts_(std::move(child_counts)) {
  level_offset_.push_back(0);
  level_.push_back(0);
  parent_.push_back(kNoParent);

  std::size_t width = 1;
  for (std::size_t n = 0; n < child_counts_.size(); ++n) {
    const auto& counts = child_counts_[n];
    if (counts.size() != width) {
      throw MalformedTree("level " + std::to_string(n) + " lists " +
                          std::to_string(counts.size()) +
                          " child counts for " + std::to_string(width) +
                          " nodes");
    }
    const NodeId begin = level_offset_[n];
    std::size_t next_width = 0;
    for (std::size_t i = 0; i < width; ++i) {
      if (counts[i] == 0) {
        throw MalformedTree("node " + std::to_string(begin + i) +
                            " at level " + std::to_string(n) +
                            " has no children below the tree depth");
      }
      for (std::size_t c = 0; c < counts[i]; ++c) {
        level_.push_back(n + 1);
        parent_.push_back(begin + i);
      }
      next_width += counts[i];
    }
    level_offset_.push_back(begin + width);
    width = next_width;
  }
  level_offset_.push_back(level_.size());

  first_child_.assign(level_.size(), kNoParent);
  child_count_.assign(level_.size(), 0);
  for (NodeId v = 1; v < level_.size(); ++v) {
    const NodeId p = parent_[v];
    if (child_count_[p] == 0) first_child_[p] = v;
    ++child_count_[p];
  }
}

std::size_t OutcomeTree::level_size(std::size_t n) const {
  return level_end(n) - level_begin(n);
}

NodeId OutcomeTree::level_begin(std::size_t n) const {
  if (n > depth()) {
    throw RangeError("level " + std::to_string(n) + " beyond tree depth " +
                     std::to_string(depth()));
  }
  return level_offset_[n];
}

NodeId OutcomeTree::level_end(std::size_t n) const {
  if (n > depth()) {
    throw RangeError("level " + std::to_string(n) + " beyond tree depth " +
                     std::to_string(depth()));
  }
  return level_offset_[n + 1];
}

NodeId OutcomeTree::ancestor_at(NodeId v, std::size_t level) const {
  if (level > level_of(v)) {
    throw RangeError("ancestor level " + std::to_string(level) +
                     " below node " + std::to_string(v));
  }
  while (level_[v] > level) v = parent_[v];
  return v;
}

bool OutcomeTree::is_ancestor(NodeId a, NodeId v) const {
  if (level_of(a) > level_of(v)) return false;
  return ancestor_at(v, level_of(a)) == a;
}

TreePtr build_tree(std::span<const std::size_t> per_level) {
  std::vector<std::vector<std::size_t>> counts;
  std::size_t width = 1;
  for (std::size_t n = 0; n < per_level.size(); ++n) {
    if (per_level[n] == 0) {
      throw MalformedTree("zero child count at level " + std::to_string(n));
    }
    counts.emplace_back(width, per_level[n]);
    width *= per_level[n];
  }
  return std::make_shared<const OutcomeTree>(std::move(counts));
}

TreePtr build_tree(std::vector<std::vector<std::size_t>> child_counts) {
  return std::make_shared<const OutcomeTree>(std::move(child_counts));
}

bool same_tree(const TreePtr& a, const TreePtr& b) {
  return a == b || (a && b && *a == *b);
}

}  // namespace aep
