#include "aep/cli/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "aep/cli/suites.hpp"
#include "aep/constructions/calibration.hpp"
#include "aep/constructions/products.hpp"
#include "aep/core/error.hpp"
#include "aep/io/bundle.hpp"
#include "aep/io/config.hpp"
#include "aep/montecarlo/simulation.hpp"
#include "aep/testing/instances.hpp"
#include "aep/verifier/snell.hpp"

namespace aep {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config;
  std::string out;
  std::string input;
  std::string suite;
  std::string weights_file;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned workers = 1;
  std::size_t paths = 0;
  std::size_t trees = 100;
  std::size_t depth = 4;
  double kappa = 0.5;
  std::optional<double> cap;
};

struct Outcome {
  int code = kExitOk;
  std::string config_echo;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};

void write_json(const json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(1) << '\n';
}

SimConfig load_sim_config(const Options& o) {
  SimConfig c = o.config.empty() ? SimConfig{} : parse_config(o.config);
  if (o.seed_given) c.seed = o.seed;
  c.validate();
  return c;
}

Outcome simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const SimConfig config = load_sim_config(o);
  const ExcursionReport report = experiment_grid(config, o.workers, o.paths);
  for (const std::string& w : report.warnings) err << "warning: " << w << '\n';

  Outcome result{kExitOk, echo_config(config), config.seed, {}};
  {
    std::ofstream f(o.out);
    if (!f) throw Error("cannot write " + o.out);
    write_excursion_csv(report, f);
  }
  result.outputs.push_back(o.out);
  if (o.paths > 0) {
    const fs::path dir = fs::path(o.out).parent_path();
    for (const RowSimulation& sim : report.simulations) {
      for (double p : config.p_exp) {
        const std::string path = (dir / paths_file_name(sim.m, p)).string();
        std::ofstream f(path);
        if (!f) throw Error("cannot write " + path);
        write_paths_csv(sim, f);
        result.outputs.push_back(path);
      }
    }
  }
  for (const ExcursionRow& r : report.rows) {
    fmt::print(out, "m={} p={} r_m={} crossings={}/{} p_hat={:.4f} [{:.4f}, {:.4f}]\n", r.m,
               r.p_exp, r.r_m, r.n_cross, r.n_traj, r.estimate.p_hat, r.estimate.lo,
               r.estimate.hi);
  }
  return result;
}

Outcome verify(const Options& o, std::ostream& out) {
  Outcome result;
  result.seed = o.seed_given ? o.seed : 1;
  json report;
  bool verdict = false;
  if (!o.suite.empty()) {
    SuiteResult r = run_suite(o.suite, SuiteOptions{o.trees, o.depth, result.seed});
    verdict = r.verdict;
    report = std::move(r.report);
    result.config_echo = fmt::format("suite = \"{}\"\ntrees = {}\ndepth = {}\nseed = {}\n",
                                     o.suite, o.trees, o.depth, result.seed);
  } else if (!o.input.empty()) {
    const Bundle bundle = load_bundle(o.input);
    const BiProcess rows = bundle_rows(bundle);
    std::vector<Certificate> certs;
    const TrendReport trend =
        certify_asymptotic(std::span(&bundle.family, 1), rows, default_tolerance(),
                           CertifyMethod::enumerate, kDefaultEnumerationCap, &certs);
    json per_m = json::array();
    for (const Certificate& c : certs) per_m.push_back(certificate_to_json(c));
    report = trend_to_json(trend);
    report["per_m"] = std::move(per_m);
    verdict = trend.verdict;
    result.config_echo = fmt::format("input = \"{}\"\n", o.input);
  } else {
    throw Error("verify needs a bundle file or --suite");
  }
  write_json(report, o.out);
  result.outputs.push_back(o.out);
  fmt::print(out, "verdict: {}\n", verdict ? "pass" : "fail");
  result.code = verdict ? kExitOk : kExitVerdictFalse;
  return result;
}

Outcome horizon(const Options& o, std::ostream& out) {
  const SimConfig config = load_sim_config(o);
  std::vector<std::size_t> index(config.m_grid.begin(), config.m_grid.end());
  std::vector<double> drift;
  for (std::size_t m : index) drift.push_back(config.drift(m));
  const DriftSequence d(index, drift);

  Outcome result{kExitOk, echo_config(config), config.seed, {o.out}};
  std::ofstream f(o.out);
  if (!f) throw Error("cannot write " + o.out);
  f << "m,p_exp,d_m,r_m,product\n";
  bool all_decay = true;
  for (double p : config.p_exp) {
    const HorizonReport h = horizon_from_drift(d, PowerRule{config.horizon_scale, p});
    for (std::size_t i = 0; i < h.m.size(); ++i) {
      fmt::print(f, "{},{},{},{},{}\n", h.m[i], p, drift[i], h.r[i].value(), h.products[i]);
    }
    fmt::print(out, "p={} log-slope={:.4f} nonincreasing={} decays={}\n", p, h.log_slope,
               h.nonincreasing, h.decays);
    all_decay = all_decay && h.decays;
  }
  result.code = all_decay ? kExitOk : kExitVerdictFalse;
  return result;
}

const std::vector<double>& alpha_grid() {
  static const std::vector<double> grid{0.001, 0.0025, 0.005, 0.01, 0.025,
                                        0.05,  0.1,    0.25,  0.5};
  return grid;
}

Outcome calibrate_cmd(const Options& o, std::ostream& out) {
  const Calibrator f = o.cap ? Calibrator::truncated_power(o.kappa, *o.cap)
                             : Calibrator::power(o.kappa);
  std::vector<MeasureFamily> families;
  PArray p;
  std::optional<Bundle> bundle;
  if (!o.input.empty()) {
    bundle = load_bundle(o.input);
    families.push_back(bundle->family);
    for (const NamedProcess& np : bundle->processes) p.rows.push_back(np.process);
  } else {
    std::vector<std::size_t> grid;
    for (std::size_t m = 2; m <= 256; m *= 2) grid.push_back(m);
    auto inst = instances::atom_p_array(grid);
    families = std::move(inst.families);
    p = std::move(inst.p);
  }
  if (p.index.empty()) {
    for (std::size_t i = 0; i < p.rows.size(); ++i) p.index.push_back(i);
  }
  const Calibrated cal = calibrate(p, f);

  std::vector<Certificate> certs;
  std::vector<WeightedSample> q;
  json rows = json::array();
  for (std::size_t i = 0; i < cal.e.size(); ++i) {
    const MeasureFamily& family = family_for_row(families, i);
    Certificate c = certify_row(family, cal.e.row(i), Horizon::infinite(), p.index[i]);
    rows.push_back({{"m", p.index[i]},
                    {"non_integrable", bool(cal.non_integrable[i])},
                    {"max", number_to_json(c.max_stopped_expectation)},
                    {"measure", c.worst_label}});
    certs.push_back(std::move(c));
    q.push_back(leaf_sample(family, 0, infimum_p(p, i)));
  }
  const TrendReport trend = trend_report(certs);
  const StrongPReport strong = check_strong_p(q, p.index, alpha_grid());

  json report = {{"kappa", o.kappa},
                 {"cap", o.cap ? json(*o.cap) : json(nullptr)},
                 {"rows", rows},
                 {"trend", trend_to_json(trend)},
                 {"alpha", strong.alpha},
                 {"strong_ratio", strong.strong_ratio},
                 {"strong", trend_to_json(strong.strong)},
                 {"weak_pass", strong.weak_pass},
                 {"verdict", trend.verdict}};
  if (bundle) {
    Bundle calibrated{bundle->tree, bundle->family, {}};
    for (std::size_t i = 0; i < cal.e.size(); ++i) {
      calibrated.processes.push_back(
          {bundle->processes[i].name, cal.e.row(i), bundle->processes[i].horizon});
    }
    report["bundle"] = bundle_to_json(calibrated);
  }
  write_json(report, o.out);
  fmt::print(out, "calibrator kappa={} cap={}: trend verdict {}, strong check {}\n", o.kappa,
             o.cap ? fmt::format("{}", *o.cap) : std::string("none"),
             trend.verdict ? "pass" : "fail", strong.strong.verdict ? "pass" : "fail");

  Outcome result{trend.verdict ? kExitOk : kExitVerdictFalse,
                 fmt::format("input = \"{}\"\nkappa = {}\n{}", o.input, o.kappa,
                             o.cap ? fmt::format("cap = {}\n", *o.cap) : std::string()),
                 0,
                 {o.out}};
  return result;
}

std::vector<double> read_weights(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read weights file " + path);
  std::stringstream text;
  text << f.rdbuf();
  const std::string s = text.str();
  if (s.find('[') != std::string::npos) {
    try {
      return json::parse(s).get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw Error("weights file " + path + ": " + e.what());
    }
  }
  std::vector<double> w;
  std::istringstream in(s);
  double x;
  while (in >> x) w.push_back(x);
  if (!in.eof()) throw Error("weights file " + path + ": expected numbers");
  return w;
}

Outcome mixture_cmd(const Options& o, std::ostream& out) {
  Outcome result;
  result.seed = o.seed_given ? o.seed : 1;
  std::optional<Bundle> bundle;
  std::vector<double> w;
  std::optional<Horizon> rho_spec;
  if (!o.input.empty()) {
    bundle = load_bundle(o.input);
    if (bundle->processes.empty()) throw Error("mixture bundle has no factor process");
    rho_spec = bundle->processes.front().horizon;
  } else {
    CounterRng rng(derive_key({result.seed, 0x31}));
    TreePtr tree = instances::random_tree(rng, o.depth, o.depth >= 4 ? 2 : 3);
    MeasureFamily family = instances::random_family(rng, tree);
    bundle = Bundle{tree, family, {{"factors", instances::random_process(rng, tree), {}}}};
    w = instances::random_weights(rng, tree->depth() + 1);
  }
  if (!o.weights_file.empty()) w = read_weights(o.weights_file);
  if (w.empty()) throw Error("mixture needs --weights-file");

  const TreeProcess& factors = bundle->processes.front().process;
  const TreeProcess e = time_mixture(w, factors);
  const std::size_t rho =
      rho_spec.value_or(Horizon::infinite()).resolve(factors.horizon_capacity());

  bool holds = true;
  json per_measure = json::array();
  for (std::size_t k = 0; k < bundle->family.size(); ++k) {
    const double sup = envelope_value(bundle->family, k, e, rho);
    const double bound = mixture_bound(w, factor_excess_means(bundle->family, k, factors, rho), rho);
    holds = holds && sup <= bound + kExactTolerance;
    per_measure.push_back(
        {{"measure", bundle->family.label(k)}, {"sup_stopped", sup}, {"bound", bound}});
  }
  Bundle mixed{bundle->tree, bundle->family, {{"mixture", e, Horizon(rho)}}};
  write_json({{"weights", w}, {"horizon", rho}, {"per_measure", per_measure},
              {"verdict", holds}, {"bundle", bundle_to_json(mixed)}},
             o.out);
  fmt::print(out, "mixture bound {}\n", holds ? "holds" : "violated");
  result.code = holds ? kExitOk : kExitVerdictFalse;
  result.config_echo = fmt::format("input = \"{}\"\nweights_file = \"{}\"\nseed = {}\n",
                                   o.input, o.weights_file, result.seed);
  result.outputs.push_back(o.out);
  return result;
}

void write_manifest(const std::string& subcommand, const Options& o, Outcome& outcome,
                    double seconds) {
  const std::string path = o.out + ".manifest.json";
  outcome.outputs.push_back(path);
  write_json({{"subcommand", subcommand},
              {"config", outcome.config_echo},
              {"version", kVersion},
              {"seed", outcome.seed},
              {"duration_seconds", seconds},
              {"outputs", outcome.outputs}},
             path);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymptotic e-processes: constructions, exact certificates, simulation",
               "aeproc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto seed_option = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& s) {
          o.seed = s;
          o.seed_given = true;
        },
        "Master seed");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo excursion experiment");
  sim->add_option("--config", o.config, "Config file (flat key = value)");
  sim->add_option("--out", o.out, "CSV output")->default_val("results.csv");
  seed_option(sim);
  sim->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--paths", o.paths, "Trajectories kept per (m, p) for plotting");

  CLI::App* ver = app.add_subcommand("verify", "Exact certificates on finite trees");
  ver->add_option("bundle", o.input, "JSON bundle of rows to certify");
  ver->add_option("--suite", o.suite, "Built-in suite")
      ->check(CLI::IsMember(suite_names()));
  ver->add_option("--trees", o.trees, "Random instances per suite");
  ver->add_option("--depth", o.depth, "Maximal tree depth")->check(CLI::PositiveNumber);
  ver->add_option("--out", o.out, "JSON report")->default_val("verify_report.json");
  seed_option(ver);

  CLI::App* hor = app.add_subcommand("horizon", "Horizons r_m from the drift bound");
  hor->add_option("--config", o.config, "Config file (flat key = value)");
  hor->add_option("--out", o.out, "CSV output")->default_val("horizon.csv");

  CLI::App* cal = app.add_subcommand("calibrate", "Calibrate a p-array to e-values");
  cal->add_option("bundle", o.input, "JSON bundle of p-array rows");
  cal->add_option("--kappa", o.kappa, "Power calibrator exponent in (0, 1)");
  cal->add_option("--cap", o.cap, "Cap for the bounded calibrator");
  cal->add_option("--out", o.out, "JSON report")->default_val("calibrate_report.json");

  CLI::App* mix = app.add_subcommand("mixture", "Time mixture and its exact bound");
  mix->add_option("bundle", o.input, "JSON bundle whose first process holds the factors");
  mix->add_option("--weights-file", o.weights_file, "Weights (JSON array or numbers)");
  mix->add_option("--depth", o.depth, "Depth of the random instance without a bundle")
      ->check(CLI::PositiveNumber);
  mix->add_option("--out", o.out, "JSON report")->default_val("mixture_report.json");
  seed_option(mix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome outcome;
    std::string name;
    if (sim->parsed()) {
      name = "simulate";
      outcome = simulate(o, out, err);
    } else if (ver->parsed()) {
      name = "verify";
      outcome = verify(o, out);
    } else if (hor->parsed()) {
      name = "horizon";
      outcome = horizon(o, out);
    } else if (cal->parsed()) {
      name = "calibrate";
      outcome = calibrate_cmd(o, out);
    } else {
      name = "mixture";
      outcome = mixture_cmd(o, out);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    write_manifest(name, o, outcome, elapsed.count());
    return outcome.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace aep
