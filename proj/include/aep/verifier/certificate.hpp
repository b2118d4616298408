#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"
#include "aep/core/stopping.hpp"
#include "aep/verifier/drift.hpp"

namespace aep {

enum class CertifyMethod {
  // Every stopping time up to the horizon, capped.
  enumerate,
  // Backward induction per measure; the argmax is the earliest optimal time.
  envelope,
};

struct Certificate {
  std::size_t m = 0;
  Horizon horizon;
  std::size_t resolved = 0;  // finite row-time horizon actually used
  double max_stopped_expectation = 0.0;
  std::size_t worst_measure = 0;
  std::string worst_label;
  StoppingTime argmax;
  // level_expectations[k][n] = E_{P_k}[E_n] for n <= resolved.
  std::vector<std::vector<double>> level_expectations;
  bool non_integrable = false;
  std::uint64_t stopping_times_checked = 0;
  CertifyMethod method = CertifyMethod::enumerate;
};

// sup over stopping times tau <= rho and measures P of E_P[E_tau]. An infinite
// horizon resolves to the row's capacity.
Certificate certify_row(const MeasureFamily& family, const TreeProcess& row,
                        Horizon rho, std::size_t m = 0,
                        CertifyMethod method = CertifyMethod::enumerate,
                        std::uint64_t cap = kDefaultEnumerationCap);

using ToleranceSchedule = std::function<double(std::size_t m)>;

// t_m = 1 / (m + 1).
ToleranceSchedule default_tolerance();

struct TrendReport {
  std::vector<std::size_t> m;
  std::vector<double> max_values;
  std::vector<double> slack;      // max - 1
  std::vector<double> tolerance;  // t_m
  bool verdict = false;
  // Smallest checked m from which slack <= t_m holds on every later row.
  std::optional<std::size_t> m0;
};

// Trend of arbitrary per-m values against 1 + t_m.
TrendReport trend_from_values(std::span<const std::size_t> m,
                              std::span<const double> values,
                              const ToleranceSchedule& schedule = default_tolerance());

TrendReport trend_report(std::span<const Certificate> certificates,
                         const ToleranceSchedule& schedule = default_tolerance());

// Certificates for every row at its attached horizon, then the trend.
// `families` holds one family per row or a single shared one.
TrendReport certify_asymptotic(std::span<const MeasureFamily> families,
                               const BiProcess& e,
                               const ToleranceSchedule& schedule = default_tolerance(),
                               CertifyMethod method = CertifyMethod::enumerate,
                               std::uint64_t cap = kDefaultEnumerationCap,
                               std::vector<Certificate>* certificates = nullptr);

}  // namespace aep
