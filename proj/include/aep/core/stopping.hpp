#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"
#include "aep/core/tree.hpp"

namespace aep {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

// A stopping time on a finite tree: a prefix-free set of stop nodes that meets
// every path from `first_level` down to `horizon` exactly once. Levels are
// absolute tree levels.
struct StoppingTime {
  std::vector<NodeId> stops;  // sorted
  std::size_t horizon = 0;
  std::size_t first_level = 0;

  bool operator==(const StoppingTime&) const = default;
};

// Throws PreconditionError naming the offending node when `tau` is not a
// valid stopping time on `tree`.
void validate(const OutcomeTree& tree, const StoppingTime& tau);

// tau == level on every path.
StoppingTime constant_time(const OutcomeTree& tree, std::size_t level);

// Number of stopping times with values in [first_level, horizon], from the
// recursion N(v) = 1 at the horizon and N(v) = 1 + prod_children N(c) above.
// Saturates at UINT64_MAX.
std::uint64_t count_stopping_times(const OutcomeTree& tree, std::size_t horizon,
                                   std::size_t first_level = 0);

// Every stopping time exactly once. Throws EnumerationLimit when the count
// exceeds `cap` and RangeError when the horizon exceeds the depth.
std::vector<StoppingTime> enumerate_stopping_times(
    const OutcomeTree& tree, std::size_t horizon, std::size_t first_level = 0,
    std::uint64_t cap = kDefaultEnumerationCap);

// Streams the stopping times instead of materializing them.
void for_each_stopping_time(const OutcomeTree& tree, std::size_t horizon,
                            std::size_t first_level, std::uint64_t cap,
                            const std::function<void(const StoppingTime&)>& visit);

// E_P[X_tau].
double stopped_expectation(const MeasureFamily& family, std::size_t measure,
                           const TreeProcess& x, const StoppingTime& tau);

}  // namespace aep
