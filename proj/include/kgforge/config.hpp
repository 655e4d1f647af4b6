// Plain key=value run configuration files. One setting per line, `#` starts
// a comment, whitespace around keys and values is trimmed, later assignments
// to the same key win. Keys use the same spelling as the CLI long flags
// (without the leading dashes), so a config file line `min-sim = 0.92` and
// the flag `--min-sim 0.92` name the same setting; flags override the file.
#pragma once

#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/errors.hpp"

namespace kgforge::config {

struct Setting {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace detail

inline std::vector<Setting> parse(std::istream& in, const std::string& label) {
  std::vector<Setting> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(label + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key(detail::trim(s.substr(0, eq)));
    std::string value(detail::trim(s.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError(label + ":" + std::to_string(lineno) + ": empty key");
    }
    out.push_back({std::move(key), std::move(value), lineno});
  }
  return out;
}

inline std::vector<Setting> parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse(in, path);
}

// Helpers for turning setting values into typed fields; every failure names
// the offending key so config mistakes are reported precisely.
inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": not a boolean: \"" + value + "\"");
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: \"" + value + "\"");
  }
}

inline long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: \"" + value + "\"");
  }
}

}  // namespace kgforge::config
