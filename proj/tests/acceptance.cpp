// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance <aeproc>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "aep/constructions.hpp"
#include "aep/io/bundle.hpp"
#include "aep/montecarlo.hpp"
#include "aep/prob_core.hpp"
#include "aep/testing/instances.hpp"
#include "aep/verifier.hpp"
#include "oracle.hpp"

using namespace aep;
namespace fs = std::filesystem;

namespace {

std::string g_aeproc;
fs::path g_dir;

struct Result {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string experiment_config(std::size_t n_traj, std::uint64_t seed) {
  return fmt::format(
      "m_grid = [32, 64, 128, 256, 512, 2048, 4096]\n"
      "drift_scale = 4\nsigma = 0.35\ntrunc_lower = -0.499999\nhorizon_scale = 4\n"
      "p_exp = [0.25, 0.5, 0.75]\nalpha = 0.05\nn_traj = {}\nn_end = 500\nseed = {}\n",
      n_traj, seed);
}

struct CsvRow {
  std::size_t m;
  double p, p_hat, lo, hi;
  std::size_t n_traj;
};

std::vector<CsvRow> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::vector<CsvRow> rows;
  while (std::getline(f, line)) {
    std::vector<std::string> cell;
    std::stringstream s(line);
    for (std::string c; std::getline(s, c, ',');) cell.push_back(c);
    rows.push_back({std::stoul(cell[0]), std::stod(cell[1]), std::stod(cell[6]), std::stod(cell[7]),
                    std::stod(cell[8]), std::stoul(cell[4])});
  }
  return rows;
}

TreePtr instance_tree(CounterRng& rng, std::size_t max_depth) {
  return instances::random_tree(rng, max_depth, max_depth >= 4 ? 2 : 3);
}

// Monte Carlo excursion bound and trend.
Result monte_carlo() {
  const std::size_t n_traj = 10000;
  std::ofstream(g_dir / "experiment.toml") << experiment_config(n_traj, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const int code = shell(fmt::format("\"{}\" simulate --config \"{}\" --out \"{}\" 2>/dev/null >/dev/null",
                                     g_aeproc, (g_dir / "experiment.toml").string(),
                                     (g_dir / "mc.csv").string()));
  const double elapsed = seconds_since(t0);
  if (code != 0) return {false, fmt::format("simulate exited {}", code)};
  const auto rows = read_csv(g_dir / "mc.csv");

  bool pass = elapsed <= 300.0;
  std::string detail = fmt::format("{:.1f}s;", elapsed);
  const double bound = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / double(n_traj));
  for (const CsvRow& r : rows) {
    if (r.m == 4096 && r.p == 0.5) {
      const bool ok = r.p_hat <= bound;
      pass = pass && ok;
      detail += fmt::format(" p_hat(4096, 0.5) = {:.4f} <= {:.4f} {};", r.p_hat, bound, ok ? "ok" : "VIOLATED");
    }
  }
  // Consecutive estimates for m >= 512 may rise by at most one Wilson
  // half-width of each estimate (overlapping intervals).
  for (double p : {0.25, 0.5, 0.75}) {
    std::vector<CsvRow> seq;
    for (const CsvRow& r : rows) {
      if (r.p == p && r.m >= 512) seq.push_back(r);
    }
    bool ok = seq.size() >= 2;
    std::string values;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      values += fmt::format("{}{:.4f}", i ? " " : "", seq[i].p_hat);
      if (i == 0) continue;
      const double allowance = (seq[i - 1].hi - seq[i - 1].lo) / 2 + (seq[i].hi - seq[i].lo) / 2;
      if (seq[i].p_hat > seq[i - 1].p_hat + allowance) ok = false;
    }
    pass = pass && ok;
    detail += fmt::format(" p={}: [{}] {};", p, values, ok ? "nonincreasing" : "INCREASING");
  }
  return {pass, detail};
}

// Optional sampling over every stopping time of 100 random supermartingales.
Result optional_sampling() {
  const auto t0 = std::chrono::steady_clock::now();
  CounterRng rng(derive_key({0xa1}));
  std::uint64_t checked = 0, violations = 0;
  double worst = -kInfinity;
  for (int i = 0; i < 100; ++i) {
    TreePtr t = instance_tree(rng, 4);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess s = instances::random_supermartingale(rng, f);
    for_each_stopping_time(*t, t->depth(), 0, kDefaultEnumerationCap, [&](const StoppingTime& tau) {
      ++checked;
      for (std::size_t k = 0; k < f.size(); ++k) {
        const double diff = oracle::stopped(f, k, s, tau.stops) - s[0];
        worst = std::max(worst, diff);
        if (diff > 1e-12) ++violations;
      }
    });
    SamplingReport r = optional_sampling_check(f, s, t->depth());
    violations += r.violations;
  }
  const double elapsed = seconds_since(t0);
  return {violations == 0 && elapsed <= 30.0,
          fmt::format("{} stopping times, max E[S_tau] - E[S_0] = {:.3g}, {} violations, {:.2f}s",
                      checked, worst, violations, elapsed)};
}

// Backward induction against enumeration.
Result snell() {
  CounterRng rng(derive_key({0xa2}));
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    TreePtr t = instance_tree(rng, 3);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess x = instances::random_process(rng, t);
    const std::size_t r = t->depth();
    double envelope = -kInfinity;
    for (std::size_t k = 0; k < f.size(); ++k) envelope = std::max(envelope, envelope_value(f, k, x, r));
    double brute = -kInfinity;
    for_each_stopping_time(*t, r, 0, kDefaultEnumerationCap, [&](const StoppingTime& tau) {
      for (std::size_t k = 0; k < f.size(); ++k) brute = std::max(brute, oracle::stopped(f, k, x, tau.stops));
    });
    worst = std::max(worst, std::abs(envelope - brute));
  }
  return {worst <= 1e-12, fmt::format("50 instances, max |envelope - enumeration| = {:.3g}", worst)};
}

// M + A = E, M a martingale, delta from the increments of A.
Result doob() {
  CounterRng rng(derive_key({0xa3}));
  double recon = 0.0, defect = 0.0, incr = 0.0;
  for (int i = 0; i < 100; ++i) {
    TreePtr t = instance_tree(rng, 4);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess e = instances::random_process(rng, t);
    const std::size_t k = i % f.size();
    DoobParts parts = doob_decompose(f, k, e);
    for (NodeId v = 0; v < t->node_count(); ++v) {
      recon = std::max(recon, std::abs(parts.martingale[v] + parts.predictable[v] - e[v]));
    }
    defect = std::max(defect, martingale_defect(f, k, parts.martingale));
    for (std::size_t n = 0; n < t->depth(); ++n) {
      std::size_t j = 0;
      for (NodeId v : t->nodes_at(n)) {
        double child_mean = 0.0;
        for (NodeId c : t->children(v)) child_mean += f.measure(k).branch[c] * e[c];
        const double delta = child_mean - e[v];
        const std::size_t i = j++;
        // Conditional expectations are only determined on supported nodes.
        if (oracle::path_probability(f, k, v) == 0.0) continue;
        for (NodeId c : t->children(v)) {
          incr = std::max(incr, std::abs(parts.predictable[c] - parts.predictable[v] - delta));
        }
        incr = std::max(incr, std::abs(parts.delta[n][i] - delta));
      }
    }
  }
  return {recon <= 1e-12 && defect <= 1e-12 && incr <= 1e-12,
          fmt::format("100 rows, |M + A - E| = {:.3g}, martingale defect = {:.3g}, |dA - delta| = {:.3g}",
                      recon, defect, incr)};
}

// Slack identity for cumulative products and decreasing slack.
Result cumulative() {
  bool pass = true;
  std::string detail;
  std::vector<double> slack;
  for (double d : {0.2, 0.05, 0.01}) {
    const std::size_t m = static_cast<std::size_t>(std::lround(4.0 / d));
    const DriftSequence seq({m}, {d});
    const std::size_t r = horizon_from_drift(seq, PowerRule{4.0, 0.5}).r[0].value();
    instances::CumulativeInstance inst = instances::cumulative_instance(d, m, r, 1);
    const double e0 = oracle::expectation(inst.family, 0, inst.e, 0);
    const double want = e0 * (std::pow(1.0 + d, double(r)) - 1.0);
    const double got = drift_excess_sum(inst.family, 0, inst.e, r);
    const bool ok = std::abs(got - want) <= 1e-12;
    Certificate c = certify_row(inst.family, inst.e, Horizon(r), m, CertifyMethod::envelope);
    slack.push_back(c.max_stopped_expectation - 1.0);
    pass = pass && ok;
    detail += fmt::format(" d={} m={} r={}: sum={:.15g} closed={:.15g} slack={:.6g};", d, m, r, got,
                          want, slack.back());
  }
  const bool decreasing = std::is_sorted(slack.rbegin(), slack.rend()) &&
                          std::adjacent_find(slack.begin(), slack.end()) == slack.end();
  return {pass && decreasing, detail + (decreasing ? " slack decreasing" : " slack NOT decreasing")};
}

// Diagonal product: expectation grows like 1.1^m and the verdict is false.
Result diagonal() {
  instances::DiagonalInstance inst = instances::diagonal_counterexample(24, 0.1);
  bool grows = true;
  double min_ratio = kInfinity;
  for (std::size_t m = 0; m <= 20; ++m) {
    TreeProcess row = diagonal_row(inst.diagonal, m);
    // Oracle: E[E_{m,m}] from parent-chain probabilities against 1.1^m.
    for (std::size_t k = 0; k < inst.family.size(); ++k) {
      const double mean = oracle::expectation(inst.family, k, row, m);
      const double target = std::pow(1.1, double(m));
      grows = grows && mean >= target * (1.0 - 1e-12);
      min_ratio = std::min(min_ratio, mean / target);
    }
  }
  BiProcess rows = instances::diagonal_rows(inst, 21, 3);
  std::vector<Certificate> certs;
  TrendReport trend = certify_asymptotic(std::span(&inst.family, 1), rows, default_tolerance(),
                                         CertifyMethod::enumerate, kDefaultEnumerationCap, &certs);
  for (std::size_t m = 0; m < certs.size(); ++m) {
    grows = grows && certs[m].max_stopped_expectation > std::pow(1.1, double(m));
  }
  Bundle b{inst.family.tree_ptr(), inst.family, {}};
  for (std::size_t m = 0; m < rows.size(); ++m) {
    b.processes.push_back({"m" + std::to_string(m), rows.row(m), Horizon(3)});
  }
  save_bundle(b, g_dir / "diagonal.json");
  const int code = shell(fmt::format("\"{}\" verify \"{}\" --out \"{}\" >/dev/null 2>&1", g_aeproc,
                                     (g_dir / "diagonal.json").string(),
                                     (g_dir / "diagonal_report.json").string()));
  return {grows && !trend.verdict && code == 2,
          fmt::format("min E[E_mm]/1.1^m = {:.12g}, sup at m=20 = {:.4f}, verdict {}, aeproc verify exit {}",
                      min_ratio, certs.back().max_stopped_expectation, trend.verdict, code)};
}

// Time mixture against its exact bound, every stopping time.
Result mixture() {
  CounterRng rng(derive_key({0xa6}));
  double worst = -kInfinity;
  std::uint64_t checked = 0;
  for (int i = 0; i < 50; ++i) {
    TreePtr t = instance_tree(rng, 4);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess factors = instances::random_process(rng, t);
    std::vector<double> w = instances::random_weights(rng, t->depth() + 1);
    TreeProcess e = time_mixture(w, factors);
    const std::size_t rho = t->depth();
    std::vector<double> bound;
    for (std::size_t k = 0; k < f.size(); ++k) {
      // eps_i from parent-chain expectations, independent of the library.
      std::vector<double> eps;
      for (std::size_t n = 0; n <= rho; ++n) eps.push_back(oracle::expectation(f, k, factors, n) - 1.0);
      double b = 1.0;
      for (std::size_t n = 0; n <= rho; ++n) b += w[n] * eps[n];
      bound.push_back(b);
    }
    for_each_stopping_time(*t, rho, 0, kDefaultEnumerationCap, [&](const StoppingTime& tau) {
      ++checked;
      for (std::size_t k = 0; k < f.size(); ++k) {
        worst = std::max(worst, oracle::stopped(f, k, e, tau.stops) - bound[k]);
      }
    });
  }
  return {worst <= 1e-12,
          fmt::format("50 instances, {} stopping times, max E[E_tau] - bound = {:.3g}", checked, worst)};
}

// Unbounded vs capped calibration of the atom array.
Result calibration() {
  std::vector<std::size_t> grid;
  for (std::size_t m = 2; m <= 256; m *= 2) grid.push_back(m);
  instances::AtomPArray inst = instances::atom_p_array(grid);

  Calibrated un = calibrate(inst.p, Calibrator::power(0.5));
  const bool flagged = std::all_of(un.non_integrable.begin(), un.non_integrable.end(),
                                   [](bool b) { return b; });

  Calibrated capped = calibrate(inst.p, Calibrator::truncated_power(0.5, 10.0));
  std::vector<Certificate> certs;
  std::vector<WeightedSample> q;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    certs.push_back(certify_row(inst.families[i], capped.e.row(i), Horizon::infinite(), grid[i]));
    q.push_back(leaf_sample(inst.families[i], 0, infimum_p(inst.p, i)));
  }
  TrendReport trend = trend_report(certs);
  const double last_slack = trend.slack.back();

  const std::vector<double> alpha{0.001, 0.0025, 0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5};
  StrongPReport sp = check_strong_p(q, grid, alpha);
  bool weak = true;
  std::size_t weak_checked = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t a = 0; a < alpha.size(); ++a) {
      if (alpha[a] >= 2.0 / double(grid[i])) {
        ++weak_checked;
        weak = weak && sp.weak_pass[i][a];
      }
    }
  }
  return {flagged && last_slack < 0.05 && !sp.strong.verdict && weak && weak_checked > 0,
          fmt::format("unbounded non-integrable on all rows: {}; capped slack at m={}: {:.4f}; strong "
                      "check {} (ratio {:.1f} .. {:.2f}); weak check passes at {} (m, alpha >= 2/m) "
                      "pairs: {}",
                      flagged, grid.back(), last_slack, sp.strong.verdict ? "passes" : "fails",
                      sp.strong_ratio.front(), sp.strong_ratio.back(), weak_checked, weak)};
}

// Horizon selection from a diagonal array.
Result diagonal_horizon_check() {
  const std::size_t big_m = 10000;
  const std::size_t rows = 100;  // N_100 = M
  std::vector<std::vector<double>> x(rows + 1, std::vector<double>(big_m + 1));
  for (std::size_t n = 1; n <= rows; ++n) {
    x[n][0] = kInfinity;
    for (std::size_t m = 1; m <= big_m; ++m) x[n][m] = 1.0 + double(n) / double(m);
  }
  std::vector<std::size_t> thresholds;
  for (std::size_t n = 1; n <= rows; ++n) thresholds.push_back(n * n);
  const std::vector<std::size_t> r = diagonal_horizon(x, thresholds);

  const bool monotone = std::is_sorted(r.begin(), r.end());
  bool reaches = true;
  for (std::size_t n = 1; n * n <= big_m; ++n) {
    reaches = reaches && std::find(r.begin(), r.end(), n) != r.end();
  }
  bool bounded = true;
  for (std::size_t m = thresholds[0]; m <= big_m; ++m) {
    bounded = bounded && x[r[m]][m] <= 1.0 + 1.0 / double(r[m]);
  }
  return {monotone && reaches && bounded,
          fmt::format("M={}, r_M={}, nondecreasing {}, reaches all n with n^2 <= M {}, "
                      "x(r_m, m) <= 1 + 1/r_m {}",
                      big_m, r.back(), monotone, reaches, bounded)};
}

// Moment matching and sampling of the truncated normal.
Result truncated_normal() {
  SimConfig c;
  bool pass = true;
  double worst_res = 0.0, worst_z = 0.0;
  const std::size_t draws = 1'000'000;
  for (std::size_t m : c.m_grid) {
    const double d = c.drift(m);
    TruncNormalParams p = trunc_normal_params(d, c.sigma * c.sigma, c.trunc_lower);
    worst_res = std::max({worst_res, p.residual_mean(), p.residual_var()});
    TruncNormalSampler g(p);
    CounterRng rng(derive_key({0xa10, m}));
    double s = 0.0, lo = kInfinity;
    for (std::size_t i = 0; i < draws; ++i) {
      const double x = g(rng);
      s += x;
      lo = std::min(lo, x);
    }
    const double z = (s / double(draws) - d) / (c.sigma / std::sqrt(double(draws)));
    worst_z = std::max(worst_z, std::abs(z));
    pass = pass && p.residual_mean() <= 1e-9 && p.residual_var() <= 1e-9 && std::abs(z) <= 4.0 &&
           lo >= c.trunc_lower;
  }
  return {pass, fmt::format("7 grid points, max residual {:.3g}, max |mean - d_m| / SE = {:.2f}, 1e6 draws each",
                            worst_res, worst_z)};
}

// Same seed, different worker counts.
Result determinism() {
  std::ofstream(g_dir / "det.toml") << experiment_config(2000, 17);
  std::vector<std::string> outputs;
  for (int workers : {1, 4}) {
    const fs::path out = g_dir / fmt::format("det_{}.csv", workers);
    const int code = shell(fmt::format("\"{}\" simulate --config \"{}\" --out \"{}\" --workers {} >/dev/null 2>&1",
                                       g_aeproc, (g_dir / "det.toml").string(), out.string(), workers));
    if (code != 0) return {false, fmt::format("simulate exited {}", code)};
    outputs.push_back(slurp(out));
  }
  const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
  return {same, fmt::format("--workers 1 vs 4: {} bytes, {}", outputs[0].size(),
                            same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to aeproc>\n";
    return 1;
  }
  g_aeproc = argv[1];
  g_dir = fs::temp_directory_path() / fmt::format("aep_acceptance_{}", derive_key({std::uint64_t(::getpid())}));
  fs::create_directories(g_dir);

  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"monte-carlo excursion bound and trend", monte_carlo},
      {"optional sampling", optional_sampling},
      {"snell envelope equivalence", snell},
      {"doob reconstruction", doob},
      {"cumulative slack identity", cumulative},
      {"diagonal counterexample", diagonal},
      {"time-mixture bound", mixture},
      {"calibration dichotomy", calibration},
      {"diagonal horizon", diagonal_horizon_check},
      {"truncated-normal moment matching", truncated_normal},
      {"determinism across workers", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << name << ": " << r.detail << std::endl;
    failed += !r.pass;
  }
  fs::remove_all(g_dir);
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
