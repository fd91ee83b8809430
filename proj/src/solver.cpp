#include "fistalab/solver.hpp"

#include <chrono>
#include <cmath>

#include "fistalab/errors.hpp"
#include "fistalab/textio.hpp"

namespace fistalab {

namespace {

// Step-size slack: lambda may sit exactly on 1/L, including when 1/L itself
// was rounded.
constexpr double kLambdaSlack = 1.0 + 1e-12;

void check_common(const CompositeProblem& problem, const SolverConfig& config) {
  if (!problem.smooth) throw ConfigError("problem has no smooth part");
  const long d = problem.dim();
  if (static_cast<long>(config.x0.size()) != d || static_cast<long>(config.x1.size()) != d) {
    throw ConfigError("x0/x1 dimension mismatch with problem of dim " + std::to_string(d));
  }
  if (!vecops::all_finite(config.x0) || !vecops::all_finite(config.x1)) {
    throw ConfigError("x0/x1 must be finite");
  }
  if (config.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (config.record_every < 1) throw ConfigError("record_every must be >= 1");
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
    throw ConfigError("lambda must be positive and finite");
  }
  if (config.grad_tol < 0.0) throw ConfigError("grad_tol must be >= 0");
}

void check_step_contract(const CompositeProblem& problem, const SolverConfig& config) {
  const double L = problem.smooth->smoothness();
  if (config.lambda > kLambdaSlack / L) {
    throw ConfigError("lambda=" + fmt17(config.lambda) + " exceeds 1/L=" + fmt17(1.0 / L));
  }
}

// y and g are scratch; writes x_{k+1} into x_out. Exactly one gradient
// evaluation. x_out may not alias inputs other than through prox.
void advance(const CompositeProblem& problem, double lambda, double t_k, double t_next,
             const Vec& x_prev, const Vec& x, long k, Vec& y, Vec& g, Vec& x_out) {
  const double alpha = momentum_alpha(t_k, t_next);
  vecops::extrapolate(x, x_prev, alpha, y);
  problem.smooth->gradient(y, g);
  if (!vecops::all_finite(g)) {
    throw NumericError("non-finite gradient at iteration " + std::to_string(k) +
                       ", |y|=" + fmt17(vecops::norm(y)));
  }
  vecops::gradient_step(y, g, lambda, x_out);
  if (problem.nonsmooth) problem.nonsmooth->prox(lambda, x_out, x_out);
  if (!vecops::all_finite(x_out)) {
    throw NumericError("non-finite iterate at iteration " + std::to_string(k) +
                       ", |y|=" + fmt17(vecops::norm(y)));
  }
}

double checked_gap(const CompositeProblem& problem, const Vec& x, long k) {
  const double gap = problem.objective_gap(x);
  const double fstar = problem.optimal_value.value_or(0.0);
  if (gap < -1e-12 * std::max(1.0, std::abs(fstar))) {
    throw NumericError("objective gap " + fmt17(gap) + " is negative at iteration " +
                       std::to_string(k) + "; stale optimal value?");
  }
  return gap;
}

SolverTrace run_impl(const CompositeProblem& problem, const SolverConfig& config,
                     bool enforce_contract) {
  check_common(problem, config);
  if (enforce_contract) check_step_contract(problem, config);

  const auto start = std::chrono::steady_clock::now();
  const TSeqPrefix prefix = generate_tseq(config.rule, config.max_iter + 1);

  SolverTrace trace;
  trace.config = config;
  trace.problem_id = problem.id();
  trace.t_values = prefix.values;
  trace.has_gaps = problem.has_gap();

  const long R = config.record_every;
  auto want_x = [&](long k) { return k <= 1 || k % R == 0; };
  auto want_y = [&](long k) { return k == 1 || k % R == 0; };
  auto push_x = [&](long k, const Vec& x) {
    trace.ks.push_back(k);
    trace.xs.push_back(x);
  };

  push_x(0, config.x0);
  push_x(1, config.x1);
  if (trace.has_gaps) {
    trace.gaps.push_back(checked_gap(problem, config.x0, 0));
    trace.gaps.push_back(checked_gap(problem, config.x1, 1));
  }
  trace.vels.push_back(vecops::dist(config.x1, config.x0));

  Vec x_prev = config.x0;
  Vec x = config.x1;
  Vec y, g, x_next;
  long executed = 0;
  for (long k = 1; k <= config.max_iter; ++k) {
    advance(problem, config.lambda, prefix.t(k), prefix.t(k + 1), x_prev, x, k, y, g, x_next);
    executed = k;
    if (want_y(k)) {
      trace.y_ks.push_back(k);
      trace.ys.push_back(y);
    }
    trace.vels.push_back(vecops::dist(x_next, x));
    if (trace.has_gaps) trace.gaps.push_back(checked_gap(problem, x_next, k + 1));
    if (want_x(k + 1)) push_x(k + 1, x_next);
    x_prev.swap(x);
    x.swap(x_next);
    if (config.grad_tol > 0.0 && vecops::norm(g) <= config.grad_tol) break;
  }
  trace.steps = executed;

  // The last iterate and ravine point are always recorded, thinned or not.
  if (trace.ks.back() != executed + 1) push_x(executed + 1, x);
  if (trace.y_ks.empty() || trace.y_ks.back() != executed) {
    trace.y_ks.push_back(executed);
    trace.ys.push_back(y);
  }
  // Early exit leaves tail series entries beyond steps+1; trim to contract.
  trace.t_values.resize(static_cast<std::size_t>(executed + 1));
  trace.vels.resize(static_cast<std::size_t>(executed + 1));
  if (trace.has_gaps) trace.gaps.resize(static_cast<std::size_t>(executed + 2));

  trace.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace

IterateState step(const IterateState& state, const CompositeProblem& problem,
                  const SolverConfig& config) {
  check_common(problem, config);
  check_step_contract(problem, config);
  if (state.k < 1 || !(state.t > 0.0) || !(state.t_next > 0.0)) {
    throw ConfigError("iterate state is not initialized (k >= 1, t, t_next required)");
  }
  IterateState next;
  next.k = state.k + 1;
  next.t = state.t_next;
  next.t_next = config.rule.next_t(state.t_next, state.k + 1);
  Vec y, g;
  next.x_prev = state.x;
  advance(problem, config.lambda, state.t, state.t_next, state.x_prev, state.x, state.k, y, g,
          next.x);
  return next;
}

SolverTrace run_solver(const CompositeProblem& problem, const SolverConfig& config) {
  return run_impl(problem, config, true);
}

std::vector<std::pair<long, Vec>> ravine_points(const SolverTrace& trace) {
  std::vector<std::pair<long, Vec>> out;
  out.reserve(trace.y_ks.size());
  for (std::size_t i = 0; i < trace.y_ks.size(); ++i) out.emplace_back(trace.y_ks[i], trace.ys[i]);
  return out;
}

namespace detail {
SolverTrace run_without_step_contract(const CompositeProblem& problem,
                                      const SolverConfig& config) {
  return run_impl(problem, config, false);
}
}  // namespace detail

}  // namespace fistalab
