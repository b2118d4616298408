#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"

namespace aep {

struct NamedProcess {
  std::string name;
  TreeProcess process;
  std::optional<Horizon> horizon;
};

// A tree, its measure family and processes on it:
//   {"depth": T, "children": [[...], ...], "measures": [{"label", "probs"}],
//    "processes": [{"name", "values": [[...], ...], "origin"?, "horizon"?}]}
// children[n][i] is the child count of the i-th node at level n. probs lists
// the branch probabilities of nodes 1..N-1 in node order. Process levels
// before the origin hold null; "inf" encodes an infinite value or horizon.
struct Bundle {
  TreePtr tree;
  MeasureFamily family;
  std::vector<NamedProcess> processes;
};

Bundle bundle_from_json(const nlohmann::json& j);
nlohmann::json bundle_to_json(const Bundle& b);

Bundle load_bundle(const std::filesystem::path& path);
void save_bundle(const Bundle& b, const std::filesystem::path& path);

// Processes as BiProcess rows m = 0, 1, ... with their horizons.
BiProcess bundle_rows(const Bundle& b);

// Doubles with +inf as "inf", NaN as null.
nlohmann::json number_to_json(double x);

}  // namespace aep
