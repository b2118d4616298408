#include "aep/io/bundle.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "aep/core/error.hpp"

namespace aep {
namespace {

using nlohmann::json;

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw MalformedTree(where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

double number_from_json(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "inf") return kInfinity;
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  throw PreconditionError(where + ": expected a number, null or \"inf\"");
}

}  // namespace

json number_to_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x) && x > 0) return "inf";
  if (std::isinf(x)) return "-inf";
  return x;
}

Bundle bundle_from_json(const json& j) {
  try {
    const auto depth = field(j, "depth", "bundle").get<std::size_t>();
    auto children = field(j, "children", "bundle").get<std::vector<std::vector<std::size_t>>>();
    if (children.size() != depth) {
      throw MalformedTree("bundle: depth " + std::to_string(depth) + " but " +
                          std::to_string(children.size()) + " child-count levels");
    }
    TreePtr tree = build_tree(std::move(children));

    std::vector<Measure> measures;
    for (const json& mj : field(j, "measures", "bundle")) {
      Measure m;
      m.label = mj.value("label", "P" + std::to_string(measures.size()));
      const auto probs = field(mj, "probs", "measure " + m.label).get<std::vector<double>>();
      if (probs.size() + 1 != tree->node_count()) {
        throw InvalidMeasure("measure " + m.label + ": " + std::to_string(probs.size()) +
                             " probabilities for " + std::to_string(tree->node_count() - 1) +
                             " edges");
      }
      m.branch.push_back(1.0);
      m.branch.insert(m.branch.end(), probs.begin(), probs.end());
      measures.push_back(std::move(m));
    }
    if (measures.empty()) measures.push_back(uniform_measure(*tree));
    MeasureFamily family(tree, std::move(measures));

    std::vector<NamedProcess> processes;
    if (j.contains("processes")) {
      for (const json& pj : j.at("processes")) {
        const std::string name = pj.value("name", "row" + std::to_string(processes.size()));
        const auto origin = pj.value("origin", std::size_t{0});
        const json& levels = field(pj, "values", "process " + name);
        if (!levels.is_array() || levels.size() != depth + 1) {
          throw PreconditionError("process " + name + ": expected " +
                                  std::to_string(depth + 1) + " levels of values");
        }
        std::vector<std::vector<double>> values;
        for (std::size_t n = 0; n < levels.size(); ++n) {
          std::vector<double> level;
          if (n >= origin) {
            for (const json& v : levels[n]) {
              level.push_back(number_from_json(v, "process " + name));
            }
          }
          values.push_back(std::move(level));
        }
        std::optional<Horizon> horizon;
        if (pj.contains("horizon")) {
          const json& h = pj.at("horizon");
          if (h.is_string() && h.get<std::string>() == "inf") {
            horizon = Horizon::infinite();
          } else {
            horizon = Horizon(h.get<std::size_t>());
          }
        }
        processes.push_back(
            {name, TreeProcess::from_levels(tree, values, origin), horizon});
      }
    }
    return Bundle{tree, std::move(family), std::move(processes)};
  } catch (const json::exception& e) {
    throw Error(std::string("bundle: ") + e.what());
  }
}

json bundle_to_json(const Bundle& b) {
  json j;
  j["depth"] = b.tree->depth();
  j["children"] = b.tree->child_counts();
  j["measures"] = json::array();
  for (std::size_t k = 0; k < b.family.size(); ++k) {
    const Measure& m = b.family.measure(k);
    j["measures"].push_back(
        {{"label", m.label}, {"probs", std::vector<double>(m.branch.begin() + 1, m.branch.end())}});
  }
  j["processes"] = json::array();
  for (const NamedProcess& p : b.processes) {
    json levels = json::array();
    for (std::size_t n = 0; n <= b.tree->depth(); ++n) {
      json level = json::array();
      for (NodeId v : b.tree->nodes_at(n)) level.push_back(number_to_json(p.process[v]));
      levels.push_back(std::move(level));
    }
    json pj = {{"name", p.name}, {"values", std::move(levels)}};
    if (p.process.origin() != 0) pj["origin"] = p.process.origin();
    if (p.horizon) {
      pj["horizon"] = p.horizon->is_infinite() ? json("inf") : json(p.horizon->value());
    }
    j["processes"].push_back(std::move(pj));
  }
  return j;
}

Bundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read bundle " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("bundle " + path.string() + ": " + e.what());
  }
  return bundle_from_json(j);
}

void save_bundle(const Bundle& b, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write bundle " + path.string());
  out << bundle_to_json(b).dump(1) << '\n';
}

BiProcess bundle_rows(const Bundle& b) {
  std::vector<TreeProcess> rows;
  HorizonSequence horizons;
  for (const NamedProcess& p : b.processes) {
    rows.push_back(p.process);
    horizons.push_back(p.horizon.value_or(Horizon::infinite()));
  }
  return BiProcess(std::move(rows), std::nullopt, std::move(horizons));
}

}  // namespace aep
