#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fistalab/problems.hpp"
#include "fistalab/tseq.hpp"

namespace fistalab {

struct SolverConfig {
  StepRule rule = StepRule::nesterov();
  double lambda = 0.0;    // step size, 0 < lambda <= 1/L
  long max_iter = 0;      // accelerated steps to take
  Vec x0;                 // x_0
  Vec x1;                 // x_1 (the scheme needs both seeds)
  long record_every = 1;  // thin stored iterates; online series stay dense
  double grad_tol = 0.0;  // > 0 enables early exit on ||grad f(y_k)||
};

// One step maps (x_{k-1}, x_k, t_k, t_{k+1}) to (x_k, x_{k+1}, t_{k+1}, t_{k+2}).
struct IterateState {
  long k = 0;
  Vec x_prev;
  Vec x;
  double t = 1.0;
  double t_next = 0.0;
};

// Run record. Scalar series (t, gap, velocity) are kept for every index
// regardless of thinning; iterate and ravine-point vectors honor record_every
// but always include k = 0, 1 and the final index.
//
// Index conventions: xs[i] is x at index ks[i]; t_values[k-1] = t_k for
// k = 1 .. steps+1; vels[k-1] = ||x_k - x_{k-1}|| for k = 1 .. steps+1;
// gaps[k] = F(x_k) - F* for k = 0 .. steps+1 (empty when F* is unknown).
struct SolverTrace {
  SolverConfig config;
  std::string problem_id;
  long steps = 0;

  std::vector<long> ks;
  std::vector<Vec> xs;
  std::vector<long> y_ks;
  std::vector<Vec> ys;

  std::vector<double> t_values;
  std::vector<double> gaps;
  std::vector<double> vels;
  bool has_gaps = false;
  double wall_time_sec = 0.0;

  double t(long k) const { return t_values[static_cast<std::size_t>(k - 1)]; }
  long last_k() const { return ks.empty() ? -1 : ks.back(); }
};

// Advance one accelerated step: y = x + alpha (x - x_prev) with
// alpha = (t - 1) / t_next, then a gradient (or proximal-gradient) step from
// y. Evaluates the gradient exactly once.
IterateState step(const IterateState& state, const CompositeProblem& problem,
                  const SolverConfig& config);

// Full run. Validates the configuration up front (throws ConfigError), aborts
// with NumericError if any iterate or gradient goes non-finite. Byte-identical
// traces for identical inputs.
SolverTrace run_solver(const CompositeProblem& problem, const SolverConfig& config);

// The extrapolated points y_k paired with their indices.
std::vector<std::pair<long, Vec>> ravine_points(const SolverTrace& trace);

namespace detail {
// Test support: same loop with the step-size contract check disabled, for
// demonstrating what the diagnostics report on an out-of-contract run.
SolverTrace run_without_step_contract(const CompositeProblem& problem,
                                      const SolverConfig& config);
}  // namespace detail

}  // namespace fistalab
