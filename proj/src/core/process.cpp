#include "aep/core/process.hpp"

#include <cmath>
#include <string>

#include "aep/core/error.hpp"

namespace aep {

TreeProcess::TreeProcess(TreePtr tree, std::vector<double> values, std::size_t origin)
    : tree_(std::move(tree)), values_(std::move(values)), origin_(origin) {
  if (!tree_) throw PreconditionError("process without a tree");
  if (values_.size() != tree_->node_count()) {
    throw PreconditionError("process has " + std::to_string(values_.size()) +
                            " values for " + std::to_string(tree_->node_count()) +
                            " nodes");
  }
  if (origin_ > tree_->depth()) {
    throw RangeError("process origin " + std::to_string(origin_) +
                     " beyond tree depth " + std::to_string(tree_->depth()));
  }
  const NodeId first = tree_->level_begin(origin_);
  for (NodeId v = 0; v < first; ++v) {
    values_[v] = std::numeric_limits<double>::quiet_NaN();
  }
  for (NodeId v = first; v < values_.size(); ++v) {
    const double x = values_[v];
    if (std::isnan(x)) {
      throw PreconditionError("process value at node " + std::to_string(v) +
                              " is not a number");
    }
    if (x < 0.0) nonnegative_ = false;
    if (std::isinf(x)) finite_ = false;
  }
}

TreeProcess TreeProcess::from_levels(TreePtr tree,
                                     const std::vector<std::vector<double>>& levels,
                                     std::size_t origin) {
  if (levels.size() != tree->depth() + 1) {
    throw PreconditionError("process lists " + std::to_string(levels.size()) +
                            " levels for a depth-" + std::to_string(tree->depth()) +
                            " tree");
  }
  std::vector<double> values(tree->node_count(),
                             std::numeric_limits<double>::quiet_NaN());
  for (std::size_t n = 0; n < levels.size(); ++n) {
    if (n < origin) continue;
    if (levels[n].size() != tree->level_size(n)) {
      throw PreconditionError("level " + std::to_string(n) + " lists " +
                              std::to_string(levels[n].size()) + " values for " +
                              std::to_string(tree->level_size(n)) + " nodes");
    }
    std::copy(levels[n].begin(), levels[n].end(),
              values.begin() + static_cast<std::ptrdiff_t>(tree->level_begin(n)));
  }
  return TreeProcess(std::move(tree), std::move(values), origin);
}

TreeProcess TreeProcess::constant(TreePtr tree, double value) {
  std::vector<double> values(tree->node_count(), value);
  return TreeProcess(std::move(tree), std::move(values));
}

std::span<const double> TreeProcess::level(std::size_t n) const {
  if (n < origin_) {
    throw RangeError("level " + std::to_string(n) + " precedes process origin " +
                     std::to_string(origin_));
  }
  const NodeId begin = tree_->level_begin(n);
  return std::span<const double>(values_).subspan(begin, tree_->level_size(n));
}

std::size_t Horizon::value() const {
  if (infinite_) throw RangeError("infinite horizon has no finite value");
  return value_;
}

DriftSequence::DriftSequence(std::vector<std::size_t> index, std::vector<double> values)
    : index_(std::move(index)), values_(std::move(values)) {
  if (index_.size() != values_.size()) {
    throw PreconditionError("drift index and values differ in length");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0)) {
      throw PreconditionError("drift d_" + std::to_string(index_[i]) +
                              " is negative");
    }
  }
}

DriftSequence DriftSequence::contiguous(std::vector<double> values, std::size_t first) {
  std::vector<std::size_t> index(values.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = first + i;
  return DriftSequence(std::move(index), std::move(values));
}

BiProcess::BiProcess(std::vector<TreeProcess> rows, std::optional<DriftSequence> drift,
                     std::optional<HorizonSequence> horizon)
    : rows_(std::move(rows)), drift_(std::move(drift)), horizon_(std::move(horizon)) {
  if (horizon_) {
    if (horizon_->size() != rows_.size()) {
      throw PreconditionError("horizon sequence length differs from row count");
    }
    for (std::size_t m = 0; m < rows_.size(); ++m) {
      const Horizon& h = (*horizon_)[m];
      if (!h.is_infinite() && h.value() > rows_[m].horizon_capacity()) {
        throw RangeError("horizon r_" + std::to_string(m) + " = " +
                         std::to_string(h.value()) + " exceeds row depth " +
                         std::to_string(rows_[m].horizon_capacity()));
      }
    }
  }
}

Horizon BiProcess::horizon_of(std::size_t m) const {
  if (!horizon_) return Horizon::infinite();
  return horizon_->at(m);
}

}  // namespace aep
