#include "fistalab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "fistalab/csvio.hpp"
#include "fistalab/diagnostics.hpp"
#include "fistalab/errors.hpp"
#include "fistalab/rng.hpp"
#include "fistalab/textio.hpp"

namespace fistalab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long parse_long(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": '" + text + "'");
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad seed for " + key + ": '" + text + "'");
  }
}

Vec parse_point(const std::string& spec, long dim) {
  if (spec == "zeros") return Vec(static_cast<std::size_t>(dim), 0.0);
  if (spec == "ones") return Vec(static_cast<std::size_t>(dim), 1.0);
  if (spec.rfind("random:", 0) == 0) {
    SeededRng rng(parse_u64(spec.substr(7), "random point"));
    Vec v(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.symmetric();
    return v;
  }
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw IoError("cannot open point file: " + spec.substr(5));
    Vec v;
    double x;
    while (in >> x) v.push_back(x);
    if (static_cast<long>(v.size()) != dim) {
      throw ConfigError("point file holds " + std::to_string(v.size()) + " values, need " +
                        std::to_string(dim));
    }
    return v;
  }
  throw ConfigError("bad point spec: '" + spec + "' (zeros|ones|random:<seed>|file:<path>)");
}

CompositeProblem resolve_problem(const ExperimentConfig& config) {
  if (config.problem.rfind("file:", 0) == 0) {
    const std::string path = config.problem.substr(5);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open problem file: " + path);
    return load_problem(in);
  }
  return make_catalog_problem(config.problem, config.dim, config.seed);
}

double resolve_lambda(const ExperimentConfig& config, const CompositeProblem& problem) {
  if (config.lambda == "auto") return 1.0 / problem.smooth->smoothness();
  double v = 0.0;
  try {
    v = parse_double(config.lambda);
  } catch (const IoError&) {
    throw ConfigError("bad lambda: '" + config.lambda + "' (auto or a positive float)");
  }
  return v;
}

std::vector<std::string> expand_checks(const std::string& spec) {
  if (spec == "all") return all_check_names();
  if (spec == "none" || spec.empty()) return {};
  std::vector<std::string> out;
  const auto& known = all_check_names();
  for (const std::string& raw : split_on(spec, ',')) {
    const std::string name = trim(raw);
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      std::string listed;
      for (const auto& k : known) listed += (listed.empty() ? "" : ", ") + k;
      throw ConfigError("unknown check '" + name + "' (known: " + listed + ")");
    }
    out.push_back(name);
  }
  return out;
}

std::filesystem::path resolve_output_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv("FISTALAB_OUTPUT_ROOT")) {
      if (*root) p = std::filesystem::path(root) / p;
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

nlohmann::json report_to_json(const CheckReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["passed"] = r.passed;
  j["worst_violation"] = r.worst_violation;
  if (r.at_k) {
    j["at_k"] = *r.at_k;
  } else {
    j["at_k"] = nullptr;
  }
  j["tolerance"] = r.tolerance;
  j["details"] = r.details;
  return j;
}

}  // namespace

const std::vector<std::string>& all_check_names() {
  static const std::vector<std::string> names = {"admissible",  "monotone", "rate",
                                                 "ergodic",     "bounds",   "two-point",
                                                 "convergence", "summability"};
  return names;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  ExperimentConfig config;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "problem") {
    config.problem = value;
  } else if (key == "dim") {
    config.dim = parse_long(value, key);
  } else if (key == "seed") {
    config.seed = parse_u64(value, key);
  } else if (key == "rule") {
    config.rule = value;
  } else if (key == "lambda") {
    config.lambda = value;
  } else if (key == "iterations") {
    config.iterations = parse_long(value, key);
  } else if (key == "x0") {
    config.x0 = value;
  } else if (key == "x1") {
    config.x1 = value;
  } else if (key == "checks") {
    config.checks = value;
  } else if (key == "output_dir") {
    config.output_dir = value;
  } else if (key == "record_every") {
    config.record_every = parse_long(value, key);
  } else {
    throw ConfigError("unknown config key: '" + key + "'");
  }
}

RunSummary run_experiment(const ExperimentConfig& config) {
  if (config.iterations < 2) throw ConfigError("iterations must be >= 2");
  const std::vector<std::string> checks = expand_checks(config.checks);
  const bool checks_are_all = config.checks == "all";
  if (!checks.empty() && config.record_every != 1) {
    throw ConfigError("checks need record_every = 1");
  }

  const CompositeProblem problem = resolve_problem(config);
  const StepRule rule = StepRule::parse(config.rule);
  SolverConfig sc;
  sc.rule = rule;
  sc.lambda = resolve_lambda(config, problem);
  sc.max_iter = config.iterations;
  sc.x0 = parse_point(config.x0, problem.dim());
  sc.x1 = config.x1 == "same" ? sc.x0 : parse_point(config.x1, problem.dim());
  sc.record_every = config.record_every;

  const bool needs_diag = std::any_of(checks.begin(), checks.end(), [](const std::string& c) {
    return c != "admissible" && c != "summability";
  });
  if (needs_diag && (!problem.has_gap() || problem.known_minimizers.empty())) {
    throw ConfigError("diagnostic checks need a problem with a known minimizer and optimal value");
  }

  const SolverTrace trace = run_solver(problem, sc);
  const std::filesystem::path dir = resolve_output_dir(config.output_dir);

  RunSummary summary;
  summary.problem_id = trace.problem_id;
  summary.rule_name = rule.name();
  summary.lambda = sc.lambda;
  summary.steps = trace.steps;
  summary.final_t = trace.t(trace.steps + 1);
  summary.final_velocity = trace.vels.back();
  summary.final_gap =
      trace.has_gaps ? trace.gaps.back() : std::numeric_limits<double>::quiet_NaN();
  summary.wall_time_sec = trace.wall_time_sec;

  summary.trace_path = (dir / "trace.csv").string();
  write_trace_csv(summary.trace_path, trace);

  const std::optional<double> theta = rule.theta();
  std::optional<LyapunovSeries> series;
  std::optional<TwoPointResult> two_point;
  std::optional<SummabilityReport> summability;
  auto series_ref = [&]() -> const LyapunovSeries& {
    if (!series) series = lyapunov_series(trace, problem.known_minimizers.front(), theta);
    return *series;
  };

  for (const std::string& check : checks) {
    if (check == "admissible") {
      summary.reports.push_back(validate_admissible(TSeqPrefix{rule, trace.t_values}));
    } else if (check == "monotone") {
      auto [w, e] = check_monotone(series_ref());
      summary.reports.push_back(std::move(w));
      summary.reports.push_back(std::move(e));
    } else if (check == "rate") {
      summary.reports.push_back(check_rate(series_ref()));
    } else if (check == "ergodic") {
      if (theta) {
        summary.reports.push_back(ergodic_reconstruct(trace, *theta));
      } else {
        summary.reports.push_back(
            make_skipped("ergodic-representation", "rule pins no theta"));
      }
    } else if (check == "bounds") {
      BoundsReport b = check_bounds(series_ref());
      summary.reports.push_back(std::move(b.iterates));
      summary.reports.push_back(std::move(b.averaged));
      summary.reports.push_back(std::move(b.velocity));
    } else if (check == "two-point") {
      if (problem.known_minimizers.size() >= 2) {
        two_point = two_point_series(trace, problem, problem.known_minimizers[0],
                                     problem.known_minimizers[1], theta);
        summary.reports.push_back(two_point->identity_D);
        summary.reports.push_back(two_point->identity_dR);
        summary.reports.push_back(two_point->tail);
        if (two_point->cesaro_mean) summary.reports.push_back(*two_point->cesaro_mean);
      } else if (checks_are_all) {
        summary.reports.push_back(
            make_skipped("two-point", "problem exposes fewer than two minimizers"));
      } else {
        throw ConfigError("two-point check needs a problem with two known minimizers");
      }
    } else if (check == "convergence") {
      summary.reports.push_back(convergence_probe(trace, problem, theta));
    } else if (check == "summability") {
      summability = summability_report(trace);
      summary.reports.push_back(summability->note);
    }
  }

  if (series) {
    summary.diagnostics_path = (dir / "diagnostics.csv").string();
    write_diagnostics_csv(summary.diagnostics_path, *series,
                          two_point ? &*two_point : nullptr,
                          summability ? &*summability : nullptr);
  }

  for (const CheckReport& r : summary.reports) {
    if (!r.passed) summary.exit_status = 1;
  }

  nlohmann::json j;
  j["problem"] = summary.problem_id;
  j["rule"] = summary.rule_name;
  j["lambda"] = summary.lambda;
  j["iterations_requested"] = config.iterations;
  j["steps"] = summary.steps;
  j["final_t"] = summary.final_t;
  j["final_velocity"] = summary.final_velocity;
  if (std::isnan(summary.final_gap)) {
    j["final_gap"] = nullptr;
  } else {
    j["final_gap"] = summary.final_gap;
  }
  j["wall_time_sec"] = summary.wall_time_sec;
  j["config"] = {{"problem", config.problem},
                 {"dim", config.dim},
                 {"seed", config.seed},
                 {"rule", config.rule},
                 {"lambda", config.lambda},
                 {"iterations", config.iterations},
                 {"x0", config.x0},
                 {"x1", config.x1},
                 {"checks", config.checks},
                 {"output_dir", config.output_dir},
                 {"record_every", config.record_every}};
  j["checks"] = nlohmann::json::array();
  for (const CheckReport& r : summary.reports) j["checks"].push_back(report_to_json(r));
  j["exit_status"] = summary.exit_status;

  summary.summary_path = (dir / "summary.json").string();
  std::ofstream out(summary.summary_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + summary.summary_path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + summary.summary_path);

  return summary;
}

CompareTable compare_rules(const std::vector<ExperimentConfig>& configs) {
  if (configs.size() < 2) throw ConfigError("compare needs at least two configs");
  for (const ExperimentConfig& c : configs) {
    if (c.problem != configs.front().problem || c.dim != configs.front().dim ||
        c.seed != configs.front().seed) {
      throw ConfigError("compare needs identical problems across configs");
    }
  }

  CompareTable table;
  table.header = {"rule", "iterations", "lambda", "final_gap", "final_t",
                  "rate_product", "E_1", "rate_ratio"};
  for (const ExperimentConfig& config : configs) {
    if (config.iterations < 2) throw ConfigError("iterations must be >= 2");
    const CompositeProblem problem = resolve_problem(config);
    if (!problem.has_gap() || problem.known_minimizers.empty()) {
      throw ConfigError("compare needs problems with a known minimizer and optimal value");
    }
    const StepRule rule = StepRule::parse(config.rule);
    SolverConfig sc;
    sc.rule = rule;
    sc.lambda = resolve_lambda(config, problem);
    sc.max_iter = config.iterations;
    sc.x0 = parse_point(config.x0, problem.dim());
    sc.x1 = config.x1 == "same" ? sc.x0 : parse_point(config.x1, problem.dim());
    const SolverTrace trace = run_solver(problem, sc);

    const long K = trace.steps + 1;
    const double tK = trace.t(K);
    const double gapK = trace.gaps.back();
    const double rate_product = sc.lambda * gapK * tK * tK;
    // t_1 = 1 makes z_1 = x_1, so E_1 needs no extrapolation.
    const Vec& z = problem.known_minimizers.front();
    const double d1 = vecops::dist(sc.x1, z);
    const double E1 = sc.lambda * trace.gaps[1] + 0.5 * d1 * d1;
    table.rows.push_back({rule.name(), std::to_string(config.iterations), fmt17(sc.lambda),
                          fmt17(gapK), fmt17(tK), fmt17(rate_product), fmt17(E1),
                          fmt17(E1 != 0.0 ? rate_product / E1 : 0.0)});
  }

  const std::filesystem::path dir = resolve_output_dir(configs.front().output_dir);
  table.csv_path = (dir / "compare.csv").string();
  std::ofstream out(table.csv_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + table.csv_path);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + table.csv_path);
  return table;
}

}  // namespace fistalab
