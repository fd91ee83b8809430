#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fistalab/report.hpp"

namespace fistalab {

// Experiment description, the unit the CLI works in. Parsed from "key = value"
// lines; every field can be overridden on the command line as key=value.
struct ExperimentConfig {
  std::string problem = "quadratic-spd";  // catalog name, or file:<path>
  long dim = 10;
  std::uint64_t seed = 0;
  std::string rule = "nesterov";
  std::string lambda = "auto";  // "auto" = 1/L, or an explicit float
  long iterations = 1000;       // accelerated steps; at least 2
  std::string x0 = "zeros";     // zeros | ones | random:<seed> | file:<path>
  std::string x1 = "same";      // same | zeros | ones | random:<seed> | file:<path>
  std::string checks = "all";   // all | none | comma-separated names
  std::string output_dir = "out";
  long record_every = 1;
};

ExperimentConfig parse_config_file(const std::string& path);
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);

// The fixed meaning of checks = all, in report order.
const std::vector<std::string>& all_check_names();

struct RunSummary {
  std::string problem_id;
  std::string rule_name;
  double lambda = 0.0;
  long steps = 0;
  double final_gap = 0.0;  // NaN when the optimal value is unknown
  double final_velocity = 0.0;
  double final_t = 0.0;
  double wall_time_sec = 0.0;
  std::vector<CheckReport> reports;
  int exit_status = 0;  // 0 all checks pass, 1 otherwise
  std::string trace_path;
  std::string diagnostics_path;  // empty when no diagnostics ran
  std::string summary_path;
};

// Runs the experiment and writes trace.csv, diagnostics.csv (when any
// diagnostic check ran) and summary.json under the output directory. The
// FISTALAB_OUTPUT_ROOT environment variable, when set, prefixes relative
// output directories.
RunSummary run_experiment(const ExperimentConfig& config);

// Side-by-side comparison of step rules on one fixed problem. All configs
// must agree on the problem; writes compare.csv under the first config's
// output directory.
struct CompareTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // printed with fmt17
  std::string csv_path;
};

CompareTable compare_rules(const std::vector<ExperimentConfig>& configs);

}  // namespace fistalab
