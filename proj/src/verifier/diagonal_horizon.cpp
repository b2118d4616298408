#include "aep/verifier/diagonal_horizon.hpp"

#include <algorithm>
#include <string>

#include "aep/core/error.hpp"

namespace aep {

std::vector<std::size_t> diagonal_horizon(const std::vector<std::vector<double>>& x,
                                          std::span<const std::size_t> thresholds) {
  if (thresholds.empty()) throw PreconditionError("no thresholds given");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] <= thresholds[i - 1]) {
      throw PreconditionError("thresholds not strictly increasing at N_" +
                              std::to_string(i + 1));
    }
  }
  if (x.size() <= thresholds.size()) {
    throw PreconditionError("array has no row n = " + std::to_string(x.size()) +
                            " for threshold N_" + std::to_string(x.size()));
  }
  const std::size_t width = x[1].size();
  for (std::size_t n = 1; n <= thresholds.size(); ++n) {
    if (x[n].size() != width) {
      throw PreconditionError("row n = " + std::to_string(n) + " has " +
                              std::to_string(x[n].size()) + " columns, expected " +
                              std::to_string(width));
    }
    const double bound = 1.0 + 1.0 / static_cast<double>(n);
    for (std::size_t m = thresholds[n - 1]; m < width; ++m) {
      if (!(x[n][m] <= bound)) {
        throw PreconditionError("x at (n = " + std::to_string(n) + ", m = " +
                                std::to_string(m) + ") is " + std::to_string(x[n][m]) +
                                " > 1 + 1/n");
      }
    }
  }

  std::vector<std::size_t> r(width, 1);
  for (std::size_t m = 0; m < width; ++m) {
    const auto reached = static_cast<std::size_t>(
        std::upper_bound(thresholds.begin(), thresholds.end(), m) - thresholds.begin());
    r[m] = std::max<std::size_t>(1, reached);
  }
  return r;
}

}  // namespace aep
