#include "fistalab/tseq.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "fistalab/errors.hpp"

namespace fistalab {

StepRule StepRule::nesterov() {
  return StepRule(RuleKind::NesterovClassic, 0.0, 0.0, nullptr);
}

StepRule StepRule::chambolle_dossal(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw ConfigError("chambolle-dossal rule needs alpha > 1");
  }
  return StepRule(RuleKind::ChambolleDossal, alpha, 0.0, nullptr);
}

StepRule StepRule::general_theta(double theta) {
  if (!(theta >= 0.0) || !(theta < 1.0)) {
    throw ConfigError("theta rule needs theta in [0, 1)");
  }
  return StepRule(RuleKind::GeneralTheta, 0.0, theta, nullptr);
}

StepRule StepRule::user_table(std::vector<double> values) {
  if (values.empty()) throw ConfigError("step table is empty");
  if (values.front() != 1.0) throw ConfigError("step table must start at 1.0");
  for (double v : values) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ConfigError("step table entries must be finite and positive");
    }
  }
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  return StepRule(RuleKind::UserTable, 0.0, 0.0, std::move(shared));
}

namespace {

std::vector<double> read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open step table file: " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) throw IoError("bad step table line in " + path + ": " + line);
    values.push_back(v);
  }
  if (values.empty()) throw IoError("step table file is empty: " + path);
  return values;
}

}  // namespace

StepRule StepRule::parse(const std::string& text) {
  if (text == "nesterov") return nesterov();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    if (head == "table") return user_table(read_table_file(rest));
    if (head == "chambolle-dossal" || head == "theta") {
      double v = 0.0;
      std::istringstream vs(rest);
      if (!(vs >> v) || !(vs >> std::ws).eof()) {
        throw ConfigError("bad numeric parameter in rule spec: " + text);
      }
      return head == "theta" ? general_theta(v) : chambolle_dossal(v);
    }
  }
  throw ConfigError("unknown step rule: " + text);
}

std::optional<double> StepRule::theta() const {
  switch (kind_) {
    case RuleKind::NesterovClassic:
      return 0.0;
    case RuleKind::ChambolleDossal:
      // Only alpha = 3 satisfies the recurrence (with theta = 1/2).
      return alpha_ == 3.0 ? std::optional<double>(0.5) : std::nullopt;
    case RuleKind::GeneralTheta:
      return theta_;
    case RuleKind::UserTable:
      return std::nullopt;
  }
  return std::nullopt;
}

const std::vector<double>& StepRule::table() const {
  if (kind_ != RuleKind::UserTable || !table_) {
    throw ConfigError("rule has no value table");
  }
  return *table_;
}

std::string StepRule::name() const {
  char buf[64];
  switch (kind_) {
    case RuleKind::NesterovClassic:
      return "nesterov";
    case RuleKind::ChambolleDossal:
      std::snprintf(buf, sizeof buf, "chambolle-dossal:%g", alpha_);
      return buf;
    case RuleKind::GeneralTheta:
      std::snprintf(buf, sizeof buf, "theta:%g", theta_);
      return buf;
    case RuleKind::UserTable:
      return "table";
  }
  return "?";
}

double StepRule::next_t(double t_k, long k) const {
  switch (kind_) {
    case RuleKind::NesterovClassic:
      return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * (t_k * t_k)));
    case RuleKind::GeneralTheta: {
      // Positive root of t^2 - (1-theta) t - (t_k^2 + theta t_k) = 0. With
      // theta = 0 every operation matches the NesterovClassic expression
      // bit-for-bit, so the two rules generate identical sequences.
      const double om = 1.0 - theta_;
      return 0.5 * (om + std::sqrt(om * om + 4.0 * (t_k * t_k + theta_ * t_k)));
    }
    case RuleKind::ChambolleDossal:
      // Closed form by index; exact in binary for alpha = 3.
      return 1.0 + static_cast<double>(k) / (alpha_ - 1.0);
    case RuleKind::UserTable: {
      const auto& tab = *table_;
      if (k < 0 || static_cast<std::size_t>(k) >= tab.size()) {
        throw ConfigError("step table exhausted at index " + std::to_string(k + 1));
      }
      return tab[static_cast<std::size_t>(k)];
    }
  }
  throw ConfigError("unreachable rule kind");
}

double momentum_alpha(double t_k, double t_next) {
  if (!(t_next > 0.0)) throw NumericError("momentum weight needs t_{k+1} > 0");
  return (t_k - 1.0) / t_next;
}

TSeqPrefix generate_tseq(const StepRule& rule, long count) {
  if (count < 1) throw ConfigError("t-sequence prefix needs count >= 1");
  TSeqPrefix prefix{rule, {}};
  prefix.values.reserve(static_cast<std::size_t>(count));
  prefix.values.push_back(1.0);
  for (long k = 1; k < count; ++k) {
    prefix.values.push_back(rule.next_t(prefix.values.back(), k));
  }
  return prefix;
}

double s_value(const TSeqPrefix& prefix, double theta, long k) {
  const double t = prefix.t(k);
  return t * t + theta * t;
}

double recurrence_residual(const TSeqPrefix& prefix, double theta, long k) {
  const double t = prefix.t(k);
  const double tn = prefix.t(k + 1);
  const double raw = tn * tn - t * t - (1.0 - theta) * tn - theta * t;
  return std::abs(raw) / std::max(1.0, tn * tn);
}

CheckReport validate_admissible(const TSeqPrefix& prefix) {
  const char* kName = "tseq-admissible";
  if (prefix.values.empty()) {
    return make_check(kName, std::numeric_limits<double>::infinity(), std::nullopt,
                      1e-12, "empty prefix");
  }
  if (prefix.values.front() != 1.0) {
    return make_check(kName, std::numeric_limits<double>::infinity(), 1L, 1e-12,
                      "t_1 must equal 1");
  }
  for (long k = 1; k <= prefix.size(); ++k) {
    const double t = prefix.t(k);
    if (!std::isfinite(t) || t <= 0.0) {
      return make_check(kName, std::numeric_limits<double>::infinity(), k, 1e-12,
                        "non-finite or non-positive t_" + std::to_string(k));
    }
  }
  // First violation of t_{k+1}^2 - t_k^2 <= t_{k+1}, scaled by max(1, t_{k+1}^2).
  for (long k = 1; k + 1 <= prefix.size(); ++k) {
    const double t = prefix.t(k);
    const double tn = prefix.t(k + 1);
    const double scale = std::max(1.0, tn * tn);
    const double excess = (tn * tn - t * t - tn) / scale;
    if (excess > 1e-12) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "t_%ld^2 - t_%ld^2 - t_%ld = %.6g exceeds slack (scaled %.6g)",
                    k + 1, k, k + 1, tn * tn - t * t - tn, excess);
      return make_check(kName, excess, k, 1e-12, buf);
    }
  }
  // Passing report carries the worst scaled slack actually observed.
  double worst = -std::numeric_limits<double>::infinity();
  long worst_k = 1;
  for (long k = 1; k + 1 <= prefix.size(); ++k) {
    const double t = prefix.t(k);
    const double tn = prefix.t(k + 1);
    const double excess = (tn * tn - t * t - tn) / std::max(1.0, tn * tn);
    if (excess > worst) {
      worst = excess;
      worst_k = k;
    }
  }
  if (prefix.size() < 2) {
    return make_check(kName, 0.0, std::nullopt, 1e-12, "single entry, nothing to compare");
  }
  return make_check(kName, std::max(worst, 0.0), worst_k, 1e-12,
                    "all pairs satisfy the admissibility inequality");
}

std::string format_report(const CheckReport& r) {
  char head[256];
  std::snprintf(head, sizeof head, "%-24s %s  worst=%.3e tol=%.3e", r.name.c_str(),
                r.passed ? "PASS" : "FAIL", r.worst_violation, r.tolerance);
  std::string out = head;
  if (r.at_k) out += " at k=" + std::to_string(*r.at_k);
  if (!r.details.empty()) out += "  [" + r.details + "]";
  return out;
}

}  // namespace fistalab
