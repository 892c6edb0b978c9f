#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace holodisc::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double budget = 0.0;        ///< allowed wall-clock seconds
  nlohmann::json details;     ///< measured values; never contains timings
};

struct Options {
  std::uint64_t seed = 1;
  std::vector<int> only;      ///< criteria 1..9 to run; empty runs all
  int compare_threads = 4;    ///< worker count for the determinism rerun
  bool determinism = true;    ///< criterion 10
};

/// One of criteria 1..9.
CriterionResult run_criterion(int id, std::uint64_t seed);

/// Deterministic summary: ids, names, pass flags and details, no timings.
nlohmann::json summary(const std::vector<CriterionResult>& results, std::uint64_t seed);

struct SuiteReport {
  std::vector<CriterionResult> results;  ///< includes criterion 10 when requested
  nlohmann::json summary;
  bool pass = false;
};

/// Runs the battery. Criterion 10 reruns the selected criteria at one worker
/// and at compare_threads workers and compares the serialized summaries.
SuiteReport run_suite(const Options& opts);

/// "criterion 3 [variable-structure disc] PASS (0.8 s)"
std::string format_line(const CriterionResult& r);

} // namespace holodisc::acceptance
