#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "aep/verifier/certificate.hpp"

namespace aep {

struct SuiteOptions {
  std::size_t trees = 100;
  std::size_t depth = 4;
  std::uint64_t seed = 1;
};

struct SuiteResult {
  bool verdict = false;
  nlohmann::json report;
};

// optional-sampling, snell, doob, ville, mixture, cumulative, diagonal.
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const SuiteOptions& options);

nlohmann::json certificate_to_json(const Certificate& c);
nlohmann::json trend_to_json(const TrendReport& t);

}  // namespace aep
