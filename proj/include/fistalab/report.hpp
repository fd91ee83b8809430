#pragma once

#include <optional>
#include <string>

namespace fistalab {

// Outcome of one diagnostic check.
//
// Invariant: passed == (worst_violation <= tolerance). Construct through
// make_check to keep the two fields consistent. Checks with a per-index
// allowance report the worst *excess* over that allowance and use
// tolerance = 0; single-scale checks report the raw violation against a
// stated tolerance. The details string says which convention applies.
struct CheckReport {
  std::string name;
  bool passed = false;
  double worst_violation = 0.0;
  std::optional<long> at_k;
  double tolerance = 0.0;
  std::string details;
};

inline CheckReport make_check(std::string name, double worst_violation,
                              std::optional<long> at_k, double tolerance,
                              std::string details) {
  CheckReport r;
  r.name = std::move(name);
  r.passed = worst_violation <= tolerance;
  r.worst_violation = worst_violation;
  r.at_k = at_k;
  r.tolerance = tolerance;
  r.details = std::move(details);
  return r;
}

// A check that is recorded but intentionally not asserted (informational
// output, or a precondition for the check was not met).
inline CheckReport make_skipped(std::string name, std::string why) {
  CheckReport r;
  r.name = std::move(name);
  r.passed = true;
  r.worst_violation = 0.0;
  r.tolerance = 0.0;
  r.details = "skipped: " + why;
  return r;
}

std::string format_report(const CheckReport& r);

}  // namespace fistalab
