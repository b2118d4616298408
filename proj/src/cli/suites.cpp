#include "aep/cli/suites.hpp"

#include <algorithm>
#include <cmath>

#include "aep/constructions/products.hpp"
#include "aep/core/error.hpp"
#include "aep/core/expectation.hpp"
#include "aep/io/bundle.hpp"
#include "aep/testing/instances.hpp"
#include "aep/verifier/drift.hpp"
#include "aep/verifier/sampling.hpp"
#include "aep/verifier/snell.hpp"

namespace aep {
namespace {

using nlohmann::json;

std::size_t branching_for(std::size_t depth) { return depth >= 4 ? 2 : 3; }

SuiteResult optional_sampling_suite(const SuiteOptions& o) {
  std::uint64_t violations = 0;
  std::uint64_t checked = 0;
  double worst = -kInfinity;
  for (std::size_t i = 0; i < o.trees; ++i) {
    CounterRng rng(derive_key({o.seed, 0x05, i}));
    TreePtr tree = instances::random_tree(rng, o.depth, branching_for(o.depth));
    MeasureFamily family = instances::random_family(rng, tree);
    TreeProcess s = instances::random_supermartingale(rng, family);
    const SamplingReport r = optional_sampling_check(family, s, s.horizon_capacity());
    violations += r.violations;
    checked += r.stopping_times_checked;
    worst = std::max(worst, r.max_difference);
  }
  return {violations == 0,
          {{"suite", "optional-sampling"}, {"instances", o.trees}, {"stopping_times", checked},
           {"max_difference", worst}, {"violations", violations}, {"verdict", violations == 0}}};
}

SuiteResult snell_suite(const SuiteOptions& o) {
  double worst = 0.0;
  for (std::size_t i = 0; i < o.trees; ++i) {
    CounterRng rng(derive_key({o.seed, 0x5e, i}));
    TreePtr tree = instances::random_tree(rng, std::min<std::size_t>(o.depth, 3), 3);
    MeasureFamily family = instances::random_family(rng, tree);
    TreeProcess e = instances::random_process(rng, tree);
    const std::size_t r = tree->depth();
    double envelope = -kInfinity;
    for (std::size_t k = 0; k < family.size(); ++k) {
      envelope = std::max(envelope, envelope_value(family, k, e, r));
    }
    const Certificate c = certify_row(family, e, Horizon(r));
    worst = std::max(worst, std::abs(envelope - c.max_stopped_expectation));
  }
  const bool ok = worst <= kExactTolerance;
  return {ok, {{"suite", "snell"}, {"instances", o.trees}, {"max_gap", worst}, {"verdict", ok}}};
}

SuiteResult doob_suite(const SuiteOptions& o) {
  double reconstruction = 0.0;
  double martingale = 0.0;
  double increments = 0.0;
  for (std::size_t i = 0; i < o.trees; ++i) {
    CounterRng rng(derive_key({o.seed, 0xd0, i}));
    TreePtr tree = instances::random_tree(rng, o.depth, branching_for(o.depth));
    MeasureFamily family = instances::random_family(rng, tree);
    TreeProcess e = instances::random_process(rng, tree);
    for (std::size_t k = 0; k < family.size(); ++k) {
      const DoobParts parts = doob_decompose(family, k, e);
      for (NodeId v = 0; v < tree->node_count(); ++v) {
        reconstruction = std::max(
            reconstruction, std::abs(parts.martingale[v] + parts.predictable[v] - e[v]));
        if (v == 0) continue;
        const NodeId u = tree->parent(v);
        const std::size_t n = tree->level_of(u);
        const double d = parts.delta[n][u - tree->level_begin(n)];
        increments = std::max(increments,
                              std::abs(parts.predictable[v] - parts.predictable[u] - d));
      }
      martingale = std::max(martingale, martingale_defect(family, k, parts.martingale));
    }
  }
  const bool ok = reconstruction <= kExactTolerance && martingale <= kExactTolerance &&
                  increments <= kExactTolerance;
  return {ok,
          {{"suite", "doob"}, {"instances", o.trees}, {"reconstruction", reconstruction},
           {"martingale_defect", martingale}, {"increment_gap", increments}, {"verdict", ok}}};
}

SuiteResult ville_suite(const SuiteOptions& o) {
  std::size_t failures = 0;
  double worst = -kInfinity;
  for (std::size_t i = 0; i < o.trees; ++i) {
    CounterRng rng(derive_key({o.seed, 0x71, i}));
    TreePtr tree = instances::random_tree(rng, o.depth, branching_for(o.depth));
    MeasureFamily family = instances::random_family(rng, tree);
    TreeProcess e = instances::random_process(rng, tree, 0.0, 3.0);
    const VilleBound b = ville_bound_exact(family, e, tree->depth(), 0.5);
    if (!b.holds) ++failures;
    worst = std::max(worst, b.lhs - b.rhs);
  }
  return {failures == 0,
          {{"suite", "ville"}, {"instances", o.trees}, {"max_lhs_minus_rhs", worst},
           {"failures", failures}, {"verdict", failures == 0}}};
}

SuiteResult mixture_suite(const SuiteOptions& o) {
  std::uint64_t violations = 0;
  double worst = -kInfinity;
  for (std::size_t i = 0; i < o.trees; ++i) {
    CounterRng rng(derive_key({o.seed, 0x31, i}));
    TreePtr tree = instances::random_tree(rng, o.depth, branching_for(o.depth));
    MeasureFamily family = instances::random_family(rng, tree);
    TreeProcess factors = instances::random_process(rng, tree, 0.0, 2.0);
    const auto w = instances::random_weights(rng, tree->depth() + 1);
    TreeProcess e = time_mixture(w, factors);
    const std::size_t rho = tree->depth();
    std::vector<double> bound;
    for (std::size_t k = 0; k < family.size(); ++k) {
      bound.push_back(mixture_bound(w, factor_excess_means(family, k, factors, rho), rho));
    }
    for_each_stopping_time(*tree, rho, 0, kDefaultEnumerationCap,
                           [&](const StoppingTime& tau) {
                             for (std::size_t k = 0; k < family.size(); ++k) {
                               const double gap =
                                   stopped_expectation(family, k, e, tau) - bound[k];
                               worst = std::max(worst, gap);
                               if (gap > kExactTolerance) ++violations;
                             }
                           });
  }
  return {violations == 0,
          {{"suite", "mixture"}, {"instances", o.trees}, {"max_gap", worst},
           {"violations", violations}, {"verdict", violations == 0}}};
}

SuiteResult cumulative_suite(const SuiteOptions& o) {
  json rows = json::array();
  bool identity = true;
  bool decreasing = true;
  double previous = kInfinity;
  for (double d : {0.2, 0.05, 0.01}) {
    const auto m = static_cast<std::size_t>(std::lround(4.0 / d));
    const std::size_t r = power_horizon(PowerRule{4.0, 0.5}, m);
    const auto inst = instances::cumulative_instance(d, m, r, o.seed);
    const double sum = drift_excess_sum(inst.family, 0, inst.e, r);
    const double e0 = expectation(inst.family, 0, inst.e, 0);
    const double closed = e0 * (std::pow(1.0 + d, static_cast<double>(r)) - 1.0);
    identity = identity && std::abs(sum - closed) <= kExactTolerance;
    decreasing = decreasing && sum < previous;
    previous = sum;
    rows.push_back({{"d", d}, {"m", m}, {"r", r}, {"slack", sum}, {"closed_form", closed}});
  }
  const bool ok = identity && decreasing;
  return {ok, {{"suite", "cumulative"}, {"rows", rows}, {"identity", identity},
               {"decreasing", decreasing}, {"verdict", ok}}};
}

SuiteResult diagonal_suite(const SuiteOptions&) {
  const auto inst = instances::diagonal_counterexample();
  const BiProcess rows = instances::diagonal_rows(inst, 21, 3);
  std::vector<Certificate> certs;
  const TrendReport trend = certify_asymptotic(std::span(&inst.family, 1), rows,
                                               default_tolerance(), CertifyMethod::enumerate,
                                               kDefaultEnumerationCap, &certs);
  json per_m = json::array();
  for (const Certificate& c : certs) per_m.push_back(certificate_to_json(c));
  json report = trend_to_json(trend);
  report["suite"] = "diagonal";
  report["per_m"] = std::move(per_m);
  return {trend.verdict, std::move(report)};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"optional-sampling", "snell",      "doob",
                                              "ville",             "mixture",    "cumulative",
                                              "diagonal"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
  if (options.depth == 0) throw RangeError("suite depth must be at least 1");
  if (name == "optional-sampling") return optional_sampling_suite(options);
  if (name == "snell") return snell_suite(options);
  if (name == "doob") return doob_suite(options);
  if (name == "ville") return ville_suite(options);
  if (name == "mixture") return mixture_suite(options);
  if (name == "cumulative") return cumulative_suite(options);
  if (name == "diagonal") return diagonal_suite(options);
  throw Error("unknown suite " + name);
}

json certificate_to_json(const Certificate& c) {
  return {{"m", c.m},
          {"max", number_to_json(c.max_stopped_expectation)},
          {"tau", c.argmax.stops},
          {"measure", c.worst_label},
          {"horizon", c.resolved},
          {"non_integrable", c.non_integrable},
          {"stopping_times", c.stopping_times_checked}};
}

json trend_to_json(const TrendReport& t) {
  json slack = json::array();
  for (double s : t.slack) slack.push_back(number_to_json(s));
  json j = {{"verdict", t.verdict}, {"slack", slack}, {"tolerance", t.tolerance}};
  j["m0"] = t.m0 ? json(*t.m0) : json(nullptr);
  return j;
}

}  // namespace aep
