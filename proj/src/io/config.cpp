#include "aep/io/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "aep/core/error.hpp"

namespace aep {
namespace {

struct Entry {
  std::string key;
  bool array = false;
  std::vector<std::string> items;  // raw tokens; quoted strings keep quotes
  int line = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::vector<Entry> tokenize(std::string_view text) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim(strip_comment(raw));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected `key = value`", line));
    }
    Entry e;
    e.key = std::string(trim(s.substr(0, eq)));
    e.line = line;
    if (e.key.empty()) throw ConfigError(fmt::format("line {}: missing key", line));
    if (!seen.insert(e.key).second) throw ConfigError(e.key + ": given twice");
    std::string_view value = trim(s.substr(eq + 1));
    if (value.empty()) throw ConfigError(e.key + ": missing value");
    if (value.front() == '[') {
      if (value.back() != ']') throw ConfigError(e.key + ": unterminated array");
      e.array = true;
      value = trim(value.substr(1, value.size() - 2));
      while (!value.empty()) {
        const auto comma = value.find(',');
        const std::string_view item = trim(value.substr(0, comma));
        if (item.empty()) throw ConfigError(e.key + ": empty array element");
        e.items.emplace_back(item);
        if (comma == std::string_view::npos) break;
        value = trim(value.substr(comma + 1));
        if (value.empty()) break;  // trailing comma
      }
    } else {
      e.items.emplace_back(value);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

double to_double(const std::string& token, const std::string& key) {
  double x = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a number, got `" + token + "`");
  }
  return x;
}

std::uint64_t to_uint(const std::string& token, const std::string& key) {
  std::uint64_t x = 0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a nonnegative integer, got `" + token + "`");
  }
  return x;
}

const std::string& scalar(const Entry& e) {
  if (e.array) throw ConfigError(e.key + ": expected a single value, got an array");
  return e.items.front();
}

}  // namespace

SimConfig parse_config_text(std::string_view text) {
  SimConfig c;
  for (const Entry& e : tokenize(text)) {
    const std::string& k = e.key;
    if (k == "m_grid") {
      if (!e.array) throw ConfigError(k + ": expected an array of integers");
      c.m_grid.clear();
      for (const auto& t : e.items) c.m_grid.push_back(to_uint(t, k));
    } else if (k == "p_exp") {
      c.p_exp.clear();
      for (const auto& t : e.items) c.p_exp.push_back(to_double(t, k));
    } else if (k == "drift_scale") {
      c.drift_scale = to_double(scalar(e), k);
    } else if (k == "sigma") {
      c.sigma = to_double(scalar(e), k);
    } else if (k == "trunc_lower") {
      c.trunc_lower = to_double(scalar(e), k);
    } else if (k == "horizon_scale") {
      c.horizon_scale = to_double(scalar(e), k);
    } else if (k == "u_halfwidth") {
      c.u_halfwidth = to_double(scalar(e), k);
    } else if (k == "alpha") {
      c.alpha = to_double(scalar(e), k);
    } else if (k == "n_traj") {
      c.n_traj = to_uint(scalar(e), k);
    } else if (k == "n_end") {
      c.n_end = to_uint(scalar(e), k);
    } else if (k == "seed") {
      c.seed = to_uint(scalar(e), k);
    } else {
      throw ConfigError(k + ": unknown key (line " + std::to_string(e.line) + ")");
    }
  }
  c.validate();
  return c;
}

SimConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string echo_config(const SimConfig& c) {
  return fmt::format(
      "m_grid = [{}]\ndrift_scale = {}\nsigma = {}\ntrunc_lower = {}\n"
      "horizon_scale = {}\nu_halfwidth = {}\np_exp = [{}]\nalpha = {}\nn_traj = {}\nn_end = {}\nseed = {}\n",
      fmt::join(c.m_grid, ", "), c.drift_scale, c.sigma, c.trunc_lower, c.horizon_scale, c.u_halfwidth,
      fmt::join(c.p_exp, ", "), c.alpha, c.n_traj, c.n_end, c.seed);
}

}  // namespace aep
