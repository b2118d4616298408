#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "aep/montecarlo/simulation.hpp"

namespace aep {

// Flat `key = value` text: numbers, quoted strings, true/false, and numeric
// arrays `[a, b]`; `#` starts a comment. Missing keys keep their defaults.
// Unknown keys, type mismatches and constraint violations throw ConfigError
// naming the key.
SimConfig parse_config_text(std::string_view text);
SimConfig parse_config(const std::filesystem::path& path);

// Text that parses back to an equal config.
std::string echo_config(const SimConfig& config);

}  // namespace aep
