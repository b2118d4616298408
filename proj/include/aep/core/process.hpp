#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "aep/core/tree.hpp"

namespace aep {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Adapted process on a tree: one value per node. A process observed from
// `origin` on carries NaN below that level; row time n sits at tree level
// origin + n. Infinite values encode non-integrable outcomes.
class TreeProcess {
 public:
  TreeProcess(TreePtr tree, std::vector<double> values, std::size_t origin = 0);

  static TreeProcess from_levels(TreePtr tree,
                                 const std::vector<std::vector<double>>& levels,
                                 std::size_t origin = 0);
  static TreeProcess constant(TreePtr tree, double value);

  const OutcomeTree& tree() const { return *tree_; }
  const TreePtr& tree_ptr() const { return tree_; }
  std::size_t origin() const { return origin_; }
  // Number of row-time steps available, depth - origin.
  std::size_t horizon_capacity() const { return tree_->depth() - origin_; }

  double operator[](NodeId v) const { return values_[v]; }
  std::span<const double> values() const { return values_; }
  std::span<const double> level(std::size_t n) const;

  bool nonnegative() const { return nonnegative_; }
  bool finite() const { return finite_; }
  bool observed(std::size_t level) const { return level >= origin_; }

 private:
  TreePtr tree_;
  std::vector<double> values_;
  std::size_t origin_ = 0;
  bool nonnegative_ = true;
  bool finite_ = true;
};

// Extended integer: a finite index or infinity.
class Horizon {
 public:
  constexpr Horizon() = default;
  constexpr explicit Horizon(std::size_t n) : value_(n) {}
  static constexpr Horizon infinite() {
    Horizon h;
    h.infinite_ = true;
    return h;
  }

  constexpr bool is_infinite() const { return infinite_; }
  std::size_t value() const;
  // Infinity resolves to `cap`; finite values are clipped to it.
  constexpr std::size_t resolve(std::size_t cap) const {
    return infinite_ || value_ > cap ? cap : value_;
  }

  constexpr bool operator==(const Horizon&) const = default;

 private:
  std::size_t value_ = 0;
  bool infinite_ = false;
};

using HorizonSequence = std::vector<Horizon>;

// Nonnegative drift bounds d_m over an explicit (not necessarily contiguous)
// grid of approximation indices.
class DriftSequence {
 public:
  DriftSequence(std::vector<std::size_t> index, std::vector<double> values);
  static DriftSequence contiguous(std::vector<double> values, std::size_t first = 0);

  std::size_t size() const { return values_.size(); }
  std::span<const std::size_t> index() const { return index_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<std::size_t> index_;
  std::vector<double> values_;
};

// E_{m,n}: one TreeProcess per approximation index m = 0, 1, ...
class BiProcess {
 public:
  explicit BiProcess(std::vector<TreeProcess> rows,
                     std::optional<DriftSequence> drift = std::nullopt,
                     std::optional<HorizonSequence> horizon = std::nullopt);

  std::size_t size() const { return rows_.size(); }
  const TreeProcess& row(std::size_t m) const { return rows_.at(m); }
  const std::vector<TreeProcess>& rows() const { return rows_; }
  const std::optional<DriftSequence>& drift() const { return drift_; }
  const std::optional<HorizonSequence>& horizon() const { return horizon_; }
  // Horizon of row m; infinity when no sequence was attached.
  Horizon horizon_of(std::size_t m) const;

 private:
  std::vector<TreeProcess> rows_;
  std::optional<DriftSequence> drift_;
  std::optional<HorizonSequence> horizon_;
};

}  // namespace aep
