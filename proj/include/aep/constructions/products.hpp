#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"

namespace aep {

// E_n = prod_{i <= n} e_i along each path, starting at the factor row's origin.
TreeProcess cumulative_product(const TreeProcess& factors);

// eta_n = E[e_{n+1} | F_n] - 1 at the nodes of row time n.
std::vector<double> factor_excess(const MeasureFamily& family, std::size_t measure,
                                  const TreeProcess& factors, std::size_t n);

// Factor row plus the bound d on its conditional excess.
struct EVariableRowSpec {
  TreeProcess factors;
  double excess_bound = 0.0;
};

// Largest conditional excess over measures and supported nodes.
double max_conditional_excess(const MeasureFamily& family, const TreeProcess& factors);

struct PowerRule {
  double scale = 4.0;
  double exponent = 0.5;
};

struct HorizonReport {
  std::vector<std::size_t> m;
  HorizonSequence r;
  std::vector<double> products;  // r_m * d_m
  bool nonincreasing = true;
  double log_slope = 0.0;  // least-squares slope of log(r_m d_m) on log m
  bool decays = true;
};

// max(1, floor(scale * m^exponent)).
std::size_t power_horizon(PowerRule rule, std::size_t m);

// r_m = power_horizon(rule, m).
HorizonReport horizon_from_drift(const DriftSequence& d, PowerRule rule);
HorizonReport horizon_from_drift(const DriftSequence& d,
                                 const std::function<std::size_t(std::size_t)>& rule);

// Diagonal factors e_{i,i} sit at tree level i of `diagonal`.
// E_{m,n} = prod_{i <= max(m, n)} e_{i,i}, one value per node of level max(m, n).
std::vector<double> diagonal_product(const TreeProcess& diagonal, std::size_t m,
                                     std::size_t n);

// Row m observed from level m on: row time n holds E_{m, m+n}.
TreeProcess diagonal_row(const TreeProcess& diagonal, std::size_t m);

// w[m][i] >= 0 with sum_i w[m][i] <= 1 on every row.
struct WeightArray {
  std::vector<std::vector<double>> w;

  void validate() const;
  std::span<const double> row(std::size_t m) const;
};

// E_n = sum_{i <= n} w_i e_i; weights past the end of `w` count as zero.
TreeProcess time_mixture(std::span<const double> w, const TreeProcess& factors);

// eps_i = E_P[e_i] - 1 for row times i <= upto.
std::vector<double> factor_excess_means(const MeasureFamily& family, std::size_t measure,
                                        const TreeProcess& factors, std::size_t upto);

// 1 + sum_{i <= rho} w_i eps_i.
double mixture_bound(std::span<const double> w, std::span<const double> eps,
                     std::size_t rho);

}  // namespace aep
