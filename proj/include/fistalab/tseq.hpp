#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fistalab/report.hpp"

namespace fistalab {

enum class RuleKind { NesterovClassic, ChambolleDossal, GeneralTheta, UserTable };

// Extrapolation-weight schedule. Instances are immutable and cheap to copy.
//
// NesterovClassic:  t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2
// ChambolleDossal:  t_k = 1 + (k - 1) / (alpha - 1), alpha > 1
// GeneralTheta:     t_{k+1} solves t_{k+1}^2 - t_k^2 = (1-theta) t_{k+1} + theta t_k,
//                   theta in [0, 1); theta = 0 reproduces NesterovClassic
// UserTable:        explicit values, first entry must be 1.0
//
// NesterovClassic satisfies the GeneralTheta recurrence with theta = 0, and
// ChambolleDossal does so exactly when alpha = 3 (theta = 1/2). theta() maps
// each rule to its recurrence parameter when one exists.
class StepRule {
 public:
  static StepRule nesterov();
  static StepRule chambolle_dossal(double alpha);
  static StepRule general_theta(double theta);
  static StepRule user_table(std::vector<double> values);

  // Accepts "nesterov", "chambolle-dossal:<alpha>", "theta:<theta>",
  // "table:<path>" (one float per line, first line 1.0).
  static StepRule parse(const std::string& text);

  RuleKind kind() const { return kind_; }
  std::optional<double> theta() const;
  double alpha_param() const { return alpha_; }
  const std::vector<double>& table() const;
  std::string name() const;

  // t_{k+1} from t_k, where k >= 1 is the index of t_k.
  double next_t(double t_k, long k) const;

 private:
  StepRule(RuleKind kind, double alpha, double theta,
           std::shared_ptr<const std::vector<double>> table)
      : kind_(kind), alpha_(alpha), theta_(theta), table_(std::move(table)) {}

  RuleKind kind_;
  double alpha_ = 0.0;
  double theta_ = 0.0;
  std::shared_ptr<const std::vector<double>> table_;
};

// alpha_k = (t_k - 1) / t_{k+1}
double momentum_alpha(double t_k, double t_next);

// t_1 .. t_K generated from a rule. values[k-1] holds t_k; t_1 = 1 always.
struct TSeqPrefix {
  StepRule rule;
  std::vector<double> values;

  long size() const { return static_cast<long>(values.size()); }
  double t(long k) const { return values[static_cast<std::size_t>(k - 1)]; }
};

TSeqPrefix generate_tseq(const StepRule& rule, long count);

// s_k = t_k^2 + theta t_k, the cumulative weight of the first k iterates.
double s_value(const TSeqPrefix& prefix, double theta, long k);

// Residual of the defining recurrence at index k (needs theta):
// t_{k+1}^2 - t_k^2 - (1-theta) t_{k+1} - theta t_k, scaled by max(1, t_{k+1}^2).
double recurrence_residual(const TSeqPrefix& prefix, double theta, long k);

// Passes iff t_1 = 1, every t_k is positive and finite, and
// t_{k+1}^2 - t_k^2 <= t_{k+1} + 1e-12 * max(1, t_{k+1}^2) for every k.
// Reports the first violating index and the violation scaled by
// max(1, t_{k+1}^2); admissibility is what the objective-gap decay rate
// actually requires, so table rules are checked against it, not against the
// exact recurrence.
CheckReport validate_admissible(const TSeqPrefix& prefix);

}  // namespace fistalab
