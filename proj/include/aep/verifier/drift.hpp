#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"

namespace aep {

// Time arguments below are row times: row time n of a process with origin o
// lives at tree level o + n.

// delta_n = E[E_{n+1} | F_n] - E_n, one value per node at row time n.
std::vector<double> drift_delta(const MeasureFamily& family, std::size_t measure,
                                const TreeProcess& row, std::size_t n);

// E_P[delta_n^+] for one measure. Infinite when the row is not integrable
// around n.
double expected_positive_drift(const MeasureFamily& family, std::size_t measure,
                               const TreeProcess& row, std::size_t n);

// One family per row, or a single family shared by every row.
const MeasureFamily& family_for_row(std::span<const MeasureFamily> families,
                                    std::size_t m);

// sum_{n < r} E_P[delta_n^+].
double drift_excess_sum(const MeasureFamily& family, std::size_t measure,
                        const TreeProcess& row, std::size_t r);

// Per row m, max over measures of E_P[delta_{m,n}^+]. `families` holds one
// family per row, or a single family shared by every row.
std::vector<double> asp_excess(std::span<const MeasureFamily> families,
                               const BiProcess& e, std::size_t n);

struct DoobParts {
  TreeProcess martingale;
  TreeProcess predictable;
  // delta[n][i]: drift at the i-th node of row time n, for n below capacity.
  std::vector<std::vector<double>> delta;
  // Delta_n = sum_{k<n} delta_k^+, accumulated along paths.
  TreeProcess drift_plus_sum;
};

// E = M + A with A_0 = 0 and A_{n+1} = A_n + delta_n, so A is predictable.
DoobParts doob_decompose(const MeasureFamily& family, std::size_t measure,
                         const TreeProcess& row);

// Largest |E[X_{n+1} | F_n] - X_n| over supported nodes.
double martingale_defect(const MeasureFamily& family, std::size_t measure,
                         const TreeProcess& x);

// First supported node (any measure) where the drift exceeds `tolerance`.
std::optional<NodeId> supermartingale_violation(const MeasureFamily& family,
                                                const TreeProcess& x,
                                                double tolerance = kExactTolerance);

// E_P|X_n - Y_n| for two processes on the same tree.
double l1_distance(const MeasureFamily& family, std::size_t measure,
                   const TreeProcess& x, const TreeProcess& y, std::size_t level);

}  // namespace aep
