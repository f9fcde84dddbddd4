#pragma once

#include <string>
#include <vector>

#include "finsler/config.hpp"
#include "finsler/report.hpp"

namespace finsler {

// Command-line overrides applied on top of a parsed config.
struct RunOptions {
  bool has_seed = false;
  uint64_t seed = 0;
  std::string out_path;          // overrides [output] report
  std::string assert_verdict;    // overrides [analysis] assert
  bool timings = false;          // populate the timings object (wall-clock ms)
  std::vector<std::string> force_run;  // replaces [analysis] run when set
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 error, 2 asserted verdict not "yes"
  JsonValue report;
  std::string report_text;  // serialized report (what was written)
};

// Runs the configured analyses against the configured metric and assembles
// the report {schema_version, config, verdicts, residuals, samples, timings}.
// Numeric and validation failures land in the report under "error" with exit
// code 1; an assert whose verdict is not "yes" exits 2. Writes the report to
// the resolved output path when one is set.
RunResult run_analysis(const Config& cfg, const RunOptions& opt = {});
RunResult run_analysis_file(const std::string& config_path,
                            const RunOptions& opt = {});

}  // namespace finsler
