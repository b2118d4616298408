#pragma once

#include <cstddef>
#include <cstdint>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"
#include "aep/core/stopping.hpp"

namespace aep {

struct SamplingReport {
  // max over stopping times and measures of E[S_tau] - E[S_0]
  double max_difference = 0.0;
  std::size_t worst_measure = 0;
  StoppingTime argmax;
  std::uint64_t stopping_times_checked = 0;
  std::uint64_t violations = 0;  // differences above kExactTolerance
};

// Requires a nonnegative supermartingale; PreconditionError names the first
// node with positive drift otherwise.
SamplingReport optional_sampling_check(const MeasureFamily& family, const TreeProcess& s,
                                       std::size_t horizon,
                                       std::uint64_t cap = kDefaultEnumerationCap);

// First row time at which the row reaches `threshold`, else `horizon`.
StoppingTime first_crossing_time(const TreeProcess& row, std::size_t horizon,
                                 double threshold);

struct VilleBound {
  double lhs = 0.0;  // P[max_{n <= rho} E_n >= 1/alpha]
  double rhs = 0.0;  // alpha * E[E_tau] at the first crossing time
  std::size_t measure = 0;
  bool holds = true;
};

// Worst case (largest lhs - rhs) over the family.
VilleBound ville_bound_exact(const MeasureFamily& family, const TreeProcess& row,
                             std::size_t rho, double alpha);

}  // namespace aep
