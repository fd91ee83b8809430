#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fistalab/errors.hpp"
#include "fistalab/harness.hpp"
#include "fistalab/problems.hpp"
#include "fistalab/report.hpp"
#include "fistalab/textio.hpp"
#include "fistalab/tseq.hpp"

namespace {

using namespace fistalab;

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
  ExperimentConfig config = path.empty() ? ExperimentConfig{} : parse_config_file(path);
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override must be key=value, got '" + item + "'");
    }
    apply_override(config, item.substr(0, eq), item.substr(eq + 1));
  }
  return config;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
  const RunSummary summary = run_experiment(load_config(config_path, overrides));
  std::printf("problem     %s\n", summary.problem_id.c_str());
  std::printf("rule        %s\n", summary.rule_name.c_str());
  std::printf("lambda      %s\n", fmt17(summary.lambda).c_str());
  std::printf("steps       %ld\n", summary.steps);
  std::printf("final gap   %s\n", fmt17(summary.final_gap).c_str());
  std::printf("final vel   %s\n", fmt17(summary.final_velocity).c_str());
  std::printf("final t     %s\n", fmt17(summary.final_t).c_str());
  std::printf("wall time   %.3fs\n", summary.wall_time_sec);
  for (const CheckReport& r : summary.reports) {
    std::printf("%s\n", format_report(r).c_str());
  }
  std::printf("trace       %s\n", summary.trace_path.c_str());
  if (!summary.diagnostics_path.empty()) {
    std::printf("diagnostics %s\n", summary.diagnostics_path.c_str());
  }
  std::printf("summary     %s\n", summary.summary_path.c_str());
  return summary.exit_status;
}

int cmd_compare(const std::vector<std::string>& config_paths) {
  std::vector<ExperimentConfig> configs;
  configs.reserve(config_paths.size());
  for (const std::string& path : config_paths) configs.push_back(parse_config_file(path));
  const CompareTable table = compare_rules(configs);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    std::printf("%s%s", i ? "," : "", table.header[i].c_str());
  }
  std::printf("\n");
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::printf("%s%s", i ? "," : "", row[i].c_str());
    }
    std::printf("\n");
  }
  std::printf("written %s\n", table.csv_path.c_str());
  return 0;
}

int cmd_validate_tseq(const std::string& rule_text, long n) {
  const StepRule rule = StepRule::parse(rule_text);
  if (rule.kind() == RuleKind::UserTable) {
    n = std::min<long>(n, static_cast<long>(rule.table().size()));
  }
  const TSeqPrefix prefix = generate_tseq(rule, n);
  const CheckReport report = validate_admissible(prefix);
  std::printf("%s\n", format_report(report).c_str());
  std::printf("t_1 = %s  t_%ld = %s\n", fmt17(prefix.t(1)).c_str(), n,
              fmt17(prefix.t(n)).c_str());
  if (const auto theta = rule.theta()) {
    double worst = 0.0;
    for (long k = 1; k < n; ++k) {
      worst = std::max(worst, std::abs(recurrence_residual(prefix, *theta, k)));
    }
    std::printf("theta = %s  worst recurrence residual = %s\n", fmt17(*theta).c_str(),
                fmt17(worst).c_str());
  } else {
    std::printf("rule pins no theta; recurrence residual not defined\n");
  }
  return report.passed ? 0 : 1;
}

int cmd_problem_dump(const std::string& name, long dim, std::uint64_t seed,
                     const std::string& out_path) {
  const CompositeProblem problem = make_catalog_problem(name, dim, seed);
  if (out_path.empty()) {
    dump_problem(problem, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path);
    dump_problem(problem, out);
    if (!out) throw IoError("failed writing " + out_path);
    std::printf("written %s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accelerated first-order solver with certificate diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  CLI::App* run = app.add_subcommand("run", "run one experiment and its checks");
  run->add_option("--config", config_path, "experiment config file (key = value lines)");
  run->add_option("overrides", overrides, "key=value config overrides");

  std::vector<std::string> compare_paths;
  CLI::App* compare = app.add_subcommand("compare", "compare step rules on one problem");
  compare->add_option("--configs", compare_paths, "config files, one per rule")
      ->required()
      ->expected(2, -1);

  std::string rule_text = "nesterov";
  long tseq_n = 1000;
  CLI::App* vt = app.add_subcommand("validate-tseq", "check a step rule's admissibility");
  vt->add_option("--rule", rule_text, "nesterov | chambolle-dossal:<a> | theta:<t> | table:<path>");
  vt->add_option("--n", tseq_n, "terms to generate")->check(CLI::PositiveNumber);

  std::string prob_name = "quadratic-spd";
  long prob_dim = 10;
  std::uint64_t prob_seed = 0;
  std::string prob_out;
  CLI::App* pd = app.add_subcommand("problem-dump", "write a catalog instance as text");
  pd->add_option("--name", prob_name, "catalog problem name");
  pd->add_option("--dim", prob_dim, "dimension")->check(CLI::PositiveNumber);
  pd->add_option("--seed", prob_seed, "instance seed");
  pd->add_option("--out", prob_out, "output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, overrides);
    if (compare->parsed()) return cmd_compare(compare_paths);
    if (vt->parsed()) return cmd_validate_tseq(rule_text, tseq_n);
    if (pd->parsed()) return cmd_problem_dump(prob_name, prob_dim, prob_seed, prob_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
