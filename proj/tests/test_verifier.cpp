#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "aep/prob_core.hpp"
#include "aep/testing/instances.hpp"
#include "aep/verifier.hpp"
#include "oracle.hpp"

using namespace aep;

namespace {

TreePtr small_random_tree(CounterRng& rng, std::size_t max_nodes = 20) {
  for (;;) {
    TreePtr t = instances::random_tree(rng, 3, 3);
    if (t->node_count() <= max_nodes) return t;
  }
}

// max over brute-force stopping times in [first, first + r] and measures.
double brute_max(const MeasureFamily& f, const TreeProcess& x, std::size_t first,
                 std::size_t r) {
  double best = -kInfinity;
  for (const auto& stops : oracle::brute_stopping_times(f.tree(), first + r, first)) {
    for (std::size_t k = 0; k < f.size(); ++k) {
      best = std::max(best, oracle::stopped(f, k, x, stops));
    }
  }
  return best;
}

// Conditional mean of x one level below v, straight from branch probabilities
// renormalized over the children.
double oracle_conditional(const MeasureFamily& f, std::size_t k, const TreeProcess& x,
                          NodeId v) {
  const OutcomeTree& t = f.tree();
  double s = 0.0;
  for (NodeId c : t.children(v)) s += f.measure(k).branch[c] * x[c];
  return s;
}

}  // namespace

TEST_CASE("drift matches the child-average oracle") {
  CounterRng rng(derive_key({21}));
  for (int trial = 0; trial < 40; ++trial) {
    TreePtr t = instances::random_tree(rng, 4, 3);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess x = instances::random_process(rng, t);
    for (std::size_t k = 0; k < f.size(); ++k) {
      for (std::size_t n = 0; n < t->depth(); ++n) {
        auto delta = drift_delta(f, k, x, n);
        double plus = 0.0;
        std::size_t i = 0;
        for (NodeId v : t->nodes_at(n)) {
          const double d = oracle_conditional(f, k, x, v) - x[v];
          if (f.path_probabilities(k)[v] > 0.0) CHECK(std::abs(delta[i] - d) <= 1e-12);
          ++i;
          plus += oracle::path_probability(f, k, v) * std::max(d, 0.0);
        }
        CHECK(std::abs(expected_positive_drift(f, k, x, n) - plus) <= 1e-12);
      }
    }
  }
}

TEST_CASE("non-integrable drift is infinite") {
  TreePtr t = build_tree(oracle::Counts{{2}});
  MeasureFamily f(t, {Measure{"fair", {1.0, 0.5, 0.5}}});
  TreeProcess x(t, {1.0, kInfinity, 0.0});
  CHECK(std::isinf(expected_positive_drift(f, 0, x, 0)));
  CHECK_THROWS(doob_decompose(f, 0, x));
}

TEST_CASE("Doob decomposition reconstructs the row") {
  CounterRng rng(derive_key({22}));
  for (int trial = 0; trial < 60; ++trial) {
    TreePtr t = instances::random_tree(rng, 4, 3);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess x = instances::random_process(rng, t);
    for (std::size_t k = 0; k < f.size(); ++k) {
      DoobParts parts = doob_decompose(f, k, x);
      for (NodeId v = 0; v < t->node_count(); ++v) {
        CHECK(parts.martingale[v] + parts.predictable[v] == doctest::Approx(x[v]).epsilon(1e-12));
      }
      CHECK(parts.predictable[0] == 0.0);
      CHECK(martingale_defect(f, k, parts.martingale) <= 1e-12);
      for (std::size_t n = 0; n < t->depth(); ++n) {
        std::size_t i = 0;
        for (NodeId v : t->nodes_at(n)) {
          for (NodeId c : t->children(v)) {
            // A is predictable: children share A_{n+1} = A_n + delta_n(v).
            CHECK(std::abs(parts.predictable[c] - parts.predictable[v] - parts.delta[n][i]) <= 1e-12);
            CHECK(std::abs(parts.drift_plus_sum[c] - parts.drift_plus_sum[v] -
                           std::max(parts.delta[n][i], 0.0)) <= 1e-12);
          }
          ++i;
        }
      }
    }
  }
}

TEST_CASE("drift excess sum adds the per-level expectations") {
  CounterRng rng(derive_key({23}));
  TreePtr t = instances::random_tree(rng, 4, 2);
  MeasureFamily f = instances::random_family(rng, t);
  TreeProcess x = instances::random_process(rng, t);
  double s = 0.0;
  for (std::size_t n = 0; n < t->depth(); ++n) s += expected_positive_drift(f, 0, x, n);
  CHECK(drift_excess_sum(f, 0, x, t->depth()) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("random supermartingales have no violations") {
  CounterRng rng(derive_key({24}));
  for (int trial = 0; trial < 40; ++trial) {
    TreePtr t = instances::random_tree(rng, 4, 2);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess s = instances::random_supermartingale(rng, f);
    CHECK(s.nonnegative());
    CHECK_FALSE(supermartingale_violation(f, s).has_value());
    for (std::size_t k = 0; k < f.size(); ++k) {
      for (std::size_t n = 0; n < t->depth(); ++n) {
        for (NodeId v : t->nodes_at(n)) {
          if (f.path_probabilities(k)[v] > 0.0) {
            CHECK(oracle_conditional(f, k, s, v) <= s[v] + 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("property: optional sampling on supermartingales") {
  CounterRng rng(derive_key({25}));
  for (int trial = 0; trial < 40; ++trial) {
    TreePtr t = small_random_tree(rng);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess s = instances::random_supermartingale(rng, f);
    SamplingReport r = optional_sampling_check(f, s, t->depth());
    CHECK(r.violations == 0);
    CHECK(r.max_difference <= 1e-12);
    CHECK(r.stopping_times_checked == count_stopping_times(*t, t->depth()));
    CHECK(brute_max(f, s, 0, t->depth()) <= s[0] + 1e-12);
  }
}

TEST_CASE("optional sampling refuses a submartingale") {
  TreePtr t = build_tree(oracle::Counts{{2}});
  MeasureFamily f(t, {Measure{"fair", {1.0, 0.5, 0.5}}});
  TreeProcess x(t, {1.0, 3.0, 0.0});
  CHECK(supermartingale_violation(f, x) == NodeId{0});
  CHECK_THROWS_AS(optional_sampling_check(f, x, 1), PreconditionError);
}

TEST_CASE("Snell envelope value equals the brute-force maximum") {
  CounterRng rng(derive_key({26}));
  for (int trial = 0; trial < 60; ++trial) {
    TreePtr t = small_random_tree(rng);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess x = instances::random_process(rng, t);
    for (std::size_t r = 0; r <= t->depth(); ++r) {
      double best = -kInfinity;
      for (std::size_t k = 0; k < f.size(); ++k) best = std::max(best, envelope_value(f, k, x, r));
      CHECK(std::abs(best - brute_max(f, x, 0, r)) <= 1e-12);
    }
  }
}

TEST_CASE("Snell envelope dominates the row and is a supermartingale") {
  CounterRng rng(derive_key({27}));
  for (int trial = 0; trial < 30; ++trial) {
    TreePtr t = instances::random_tree(rng, 4, 3);
    MeasureFamily f = instances::random_family(rng, t, 1, 0.0);
    TreeProcess x = instances::random_process(rng, t);
    TreeProcess l = snell_envelope_bounded(f, 0, x, t->depth());
    for (NodeId v = 0; v < t->node_count(); ++v) CHECK(l[v] >= x[v] - 1e-15);
    CHECK_FALSE(supermartingale_violation(f, l).has_value());
  }
}

TEST_CASE("certify_row: both methods agree with brute force") {
  CounterRng rng(derive_key({28}));
  for (int trial = 0; trial < 40; ++trial) {
    TreePtr t = small_random_tree(rng);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess x = instances::random_process(rng, t);
    const std::size_t r = t->depth();
    Certificate a = certify_row(f, x, Horizon(r));
    Certificate b = certify_row(f, x, Horizon(r), 0, CertifyMethod::envelope);
    const double want = brute_max(f, x, 0, r);
    CHECK(std::abs(a.max_stopped_expectation - want) <= 1e-12);
    CHECK(std::abs(b.max_stopped_expectation - want) <= 1e-12);
    CHECK(a.stopping_times_checked == count_stopping_times(*t, r));
    // The reported argmax attains the maximum.
    CHECK_NOTHROW(validate(*t, a.argmax));
    CHECK_NOTHROW(validate(*t, b.argmax));
    CHECK(std::abs(oracle::stopped(f, a.worst_measure, x, a.argmax.stops) - want) <= 1e-12);
    CHECK(std::abs(oracle::stopped(f, b.worst_measure, x, b.argmax.stops) - want) <= 1e-12);
    CHECK(a.level_expectations.size() == f.size());
    CHECK(a.level_expectations[0].size() == r + 1);
  }
}

TEST_CASE("certify_row respects the row origin and infinite horizons") {
  instances::DiagonalInstance inst = instances::diagonal_counterexample(6, 0.1, std::vector<std::size_t>{1, 3});
  TreeProcess row = diagonal_row(inst.diagonal, 2);
  Certificate c = certify_row(inst.family, row, Horizon::infinite(), 2);
  CHECK(c.resolved == 4);
  CHECK(c.argmax.first_level == 2);
  CHECK(std::abs(c.max_stopped_expectation - brute_max(inst.family, row, 2, 4)) <= 1e-12);
  // The tilted measure lifts each binary factor mean to 1.1 * 1.1.
  CHECK(c.worst_label == inst.family.label(1));
  CHECK(std::abs(c.max_stopped_expectation - std::pow(1.1, 8)) <= 1e-12);
}

TEST_CASE("certify_row flags non-integrable rows") {
  TreePtr t = build_tree(oracle::Counts{{2}});
  MeasureFamily f(t, {Measure{"fair", {1.0, 0.5, 0.5}}});
  TreeProcess x(t, {1.0, kInfinity, 0.0});
  Certificate c = certify_row(f, x, Horizon(1));
  CHECK(c.non_integrable);
  CHECK(std::isinf(c.max_stopped_expectation));
}

TEST_CASE("trend verdict and m0") {
  std::vector<std::size_t> m{1, 2, 3, 4, 5};
  // t_m = 1/(m+1): 0.5, 0.333, 0.25, 0.2, 0.1667
  std::vector<double> good{1.9, 1.5, 1.2, 1.1, 1.0};
  TrendReport r = trend_from_values(m, good);
  CHECK(r.verdict);
  CHECK(r.m0 == std::size_t{3});
  CHECK(r.slack[0] == doctest::Approx(0.9));
  CHECK(r.tolerance[1] == doctest::Approx(1.0 / 3.0));

  std::vector<double> bad{1.0, 1.0, 1.0, 1.0, 1.3};
  TrendReport b = trend_from_values(m, bad);
  CHECK_FALSE(b.verdict);
  CHECK_FALSE(b.m0.has_value());

  TrendReport custom = trend_from_values(m, bad, [](std::size_t) { return 0.5; });
  CHECK(custom.verdict);
  CHECK(custom.m0 == std::size_t{1});
}

TEST_CASE("property: m0 is minimal") {
  CounterRng rng(derive_key({29}));
  std::uniform_real_distribution<double> u(0.9, 1.6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> m;
    std::vector<double> v;
    for (std::size_t i = 0; i < 8; ++i) {
      m.push_back(i);
      v.push_back(u(rng));
    }
    TrendReport r = trend_from_values(m, v);
    auto tail_ok = [&](std::size_t from) {
      for (std::size_t i = from; i < m.size(); ++i) {
        if (v[i] - 1.0 > 1.0 / (m[i] + 1.0)) return false;
      }
      return true;
    };
    if (r.m0) {
      CHECK(tail_ok(*r.m0));
      if (*r.m0 > 0) CHECK_FALSE(tail_ok(*r.m0 - 1));
    } else {
      CHECK_FALSE(tail_ok(m.size() - 1));
    }
  }
}

TEST_CASE("first crossing time and Ville bound") {
  const std::size_t levels[] = {2, 2};
  TreePtr t = build_tree(levels);
  MeasureFamily f(t, {uniform_measure(*t)});
  TreeProcess x = TreeProcess::from_levels(t, {{1.0}, {2.0, 0.0}, {4.0, 0.0, 0.0, 0.0}});
  StoppingTime tau = first_crossing_time(x, 2, 4.0);
  CHECK(tau.stops == std::vector<NodeId>{3, 4, 5, 6});
  VilleBound vb = ville_bound_exact(f, x, 2, 0.25);
  CHECK(vb.lhs == doctest::Approx(0.25));
  CHECK(vb.rhs == doctest::Approx(0.25));
  CHECK(vb.holds);
  CHECK_THROWS_AS(ville_bound_exact(f, x, 2, 0.0), RangeError);
  CHECK_THROWS_AS(ville_bound_exact(f, x, 2, 1.0), RangeError);
}

TEST_CASE("property: Ville bound holds for supermartingales") {
  CounterRng rng(derive_key({30}));
  for (int trial = 0; trial < 60; ++trial) {
    TreePtr t = instances::random_tree(rng, 4, 3);
    MeasureFamily f = instances::random_family(rng, t);
    TreeProcess s = instances::random_supermartingale(rng, f);
    for (double alpha : {0.1, 0.5, 0.9}) {
      VilleBound vb = ville_bound_exact(f, s, t->depth(), alpha);
      CHECK(vb.holds);
      CHECK(vb.lhs <= alpha * s[0] + 1e-12);
    }
  }
}

TEST_CASE("diagonal horizon on x = 1 + n/m") {
  const std::size_t big_m = 400;
  std::vector<std::vector<double>> x(25, std::vector<double>(big_m + 1, 0.0));
  for (std::size_t n = 1; n < x.size(); ++n) {
    for (std::size_t m = 1; m <= big_m; ++m) x[n][m] = 1.0 + double(n) / double(m);
    x[n][0] = kInfinity;
  }
  std::vector<std::size_t> thresholds;
  for (std::size_t n = 1; n < x.size(); ++n) thresholds.push_back(n * n);
  std::vector<std::size_t> r = diagonal_horizon(x, thresholds);
  REQUIRE(r.size() == big_m + 1);
  CHECK(r[0] == 1);
  CHECK(r[15] == 3);
  CHECK(r[16] == 4);
  CHECK(r[400] == 20);
  CHECK(std::is_sorted(r.begin(), r.end()));
}

TEST_CASE("diagonal horizon rejects bad inputs") {
  std::vector<std::vector<double>> x{{}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
  const std::size_t dec[] = {2, 1};
  CHECK_THROWS_AS(diagonal_horizon(x, dec), PreconditionError);
  const std::size_t ok[] = {1, 2};
  x[2][2] = 1.6;  // above 1 + 1/2 with m >= N_2
  try {
    diagonal_horizon(x, ok);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("n = 2") != std::string::npos);
    CHECK(std::string(e.what()).find("m = 2") != std::string::npos);
  }
}
