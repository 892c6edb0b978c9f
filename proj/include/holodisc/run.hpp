#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace holodisc {

/// Declared configuration field of a subcommand.
struct FieldSpec {
  enum class Kind { Text, Path, Number, Positive, Integer, Count, Grid };
  std::string name;
  Kind kind;
  std::string fallback;  ///< default value as text; empty means unset
  std::string help;
};

/// Subcommand names in registry order.
const std::vector<std::string>& commands();
/// Fields accepted by a subcommand (common fields included).
const std::vector<FieldSpec>& fields(std::string_view command);

/// Subcommand plus key = value settings. Text form:
///   command = solve-disc
///   A = const 0.3
///   grid = 128x256
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;

  static RunConfig parse(std::string_view text);
  /// Canonical text form; parse(echo()) == *this.
  std::string echo() const;
  /// Fills defaults and checks every field. Throws ConfigError naming the field.
  RunConfig validated() const;

  bool has(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::pair<int, int> grid(const std::string& key) const;
  std::uint64_t seed() const;

  bool operator==(const RunConfig&) const = default;
};

struct RunReport {
  RunConfig config;
  std::uint64_t seed = 0;
  nlohmann::json results = nlohmann::json::object();
  std::map<std::string, double> timings;
  std::vector<std::pair<std::string, bool>> checks;

  bool passed() const;
  /// Timings are left out unless requested so reruns compare equal.
  nlohmann::json to_json(bool with_timings = false) const;
};

/// Dispatches to the named scenario and writes the configured outputs.
RunReport run(const RunConfig& config);

/// 0 when every check passes, 1 otherwise.
int exit_code(const RunReport& report);

} // namespace holodisc
