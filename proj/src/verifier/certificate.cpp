#include "aep/verifier/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aep/core/error.hpp"
#include "aep/core/expectation.hpp"
#include "aep/verifier/snell.hpp"

namespace aep {
namespace {

// Earliest optimal stopping time: stop as soon as E reaches its envelope.
StoppingTime optimal_time(const TreeProcess& row, const TreeProcess& envelope,
                          std::size_t horizon) {
  const OutcomeTree& tree = row.tree();
  StoppingTime tau;
  tau.first_level = row.origin();
  tau.horizon = horizon;
  std::vector<NodeId> pending(tree.nodes_at(row.origin()).begin(),
                              tree.nodes_at(row.origin()).end());
  while (!pending.empty()) {
    const NodeId v = pending.back();
    pending.pop_back();
    if (tree.level_of(v) == horizon || row[v] >= envelope[v]) {
      tau.stops.push_back(v);
    } else {
      for (NodeId c : tree.children(v)) pending.push_back(c);
    }
  }
  std::sort(tau.stops.begin(), tau.stops.end());
  return tau;
}

}  // namespace

Certificate certify_row(const MeasureFamily& family, const TreeProcess& row,
                        Horizon rho, std::size_t m, CertifyMethod method,
                        std::uint64_t cap) {
  require_same_tree(family, row);
  if (!rho.is_infinite() && rho.value() > row.horizon_capacity()) {
    throw RangeError("horizon " + std::to_string(rho.value()) + " of row " +
                     std::to_string(m) + " beyond its capacity " +
                     std::to_string(row.horizon_capacity()));
  }
  Certificate cert;
  cert.m = m;
  cert.horizon = rho;
  cert.resolved = rho.resolve(row.horizon_capacity());
  cert.method = method;
  const std::size_t first = row.origin();
  const std::size_t last = first + cert.resolved;

  for (std::size_t k = 0; k < family.size(); ++k) {
    std::vector<double> per_level;
    for (std::size_t level = first; level <= last; ++level) {
      per_level.push_back(expectation(family, k, row, level));
    }
    cert.level_expectations.push_back(std::move(per_level));
  }

  bool have = false;
  auto consider = [&](double value, std::size_t k, const StoppingTime& tau) {
    if (!have || value > cert.max_stopped_expectation) {
      have = true;
      cert.max_stopped_expectation = value;
      cert.worst_measure = k;
      cert.argmax = tau;
    }
  };

  if (method == CertifyMethod::enumerate) {
    for_each_stopping_time(row.tree(), last, first, cap, [&](const StoppingTime& tau) {
      ++cert.stopping_times_checked;
      for (std::size_t k = 0; k < family.size(); ++k) {
        consider(stopped_expectation(family, k, row, tau), k, tau);
      }
    });
  } else {
    for (std::size_t k = 0; k < family.size(); ++k) {
      const TreeProcess l = snell_envelope_bounded(family, k, row, cert.resolved);
      const auto path = family.path_probabilities(k);
      double value = 0.0;
      for (NodeId v : row.tree().nodes_at(first)) value += weighted(path[v], l[v]);
      consider(value, k, optimal_time(row, l, last));
    }
  }
  cert.worst_label = family.label(cert.worst_measure);
  cert.non_integrable = std::isinf(cert.max_stopped_expectation);
  return cert;
}

ToleranceSchedule default_tolerance() {
  return [](std::size_t m) { return 1.0 / (static_cast<double>(m) + 1.0); };
}

TrendReport trend_from_values(std::span<const std::size_t> m,
                              std::span<const double> values,
                              const ToleranceSchedule& schedule) {
  if (m.size() != values.size()) {
    throw PreconditionError("trend needs one value per index");
  }
  TrendReport report;
  for (std::size_t i = 0; i < m.size(); ++i) {
    report.m.push_back(m[i]);
    report.max_values.push_back(values[i]);
    report.slack.push_back(values[i] - 1.0);
    report.tolerance.push_back(schedule(m[i]));
  }
  std::size_t start = report.slack.size();
  while (start > 0 && report.slack[start - 1] <= report.tolerance[start - 1]) --start;
  if (start < report.slack.size()) report.m0 = report.m[start];
  report.verdict = report.m0.has_value();
  return report;
}

TrendReport trend_report(std::span<const Certificate> certificates,
                         const ToleranceSchedule& schedule) {
  std::vector<std::size_t> m;
  std::vector<double> values;
  for (const Certificate& c : certificates) {
    m.push_back(c.m);
    values.push_back(c.max_stopped_expectation);
  }
  return trend_from_values(m, values, schedule);
}

TrendReport certify_asymptotic(std::span<const MeasureFamily> families,
                               const BiProcess& e, const ToleranceSchedule& schedule,
                               CertifyMethod method, std::uint64_t cap,
                               std::vector<Certificate>* certificates) {
  std::vector<Certificate> certs;
  for (std::size_t m = 0; m < e.size(); ++m) {
    certs.push_back(certify_row(family_for_row(families, m), e.row(m), e.horizon_of(m),
                                m, method, cap));
  }
  TrendReport report = trend_report(certs, schedule);
  if (certificates) *certificates = std::move(certs);
  return report;
}

}  // namespace aep
