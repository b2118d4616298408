#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aep {

// x[n][m] for n >= 1 (row 0 is ignored); thresholds[n - 1] = N_n, strictly
// increasing. Returns r_0..r_M with M + 1 = x[1].size(): r_m = 1 below N_1 and
// r_m = n on [N_n, N_{n+1}). Throws PreconditionError naming (n, m) when some
// x[n][m] with m >= N_n exceeds 1 + 1/n.
std::vector<std::size_t> diagonal_horizon(const std::vector<std::vector<double>>& x,
                                          std::span<const std::size_t> thresholds);

}  // namespace aep
