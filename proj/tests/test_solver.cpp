#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fistalab/errors.hpp"
#include "fistalab/solver.hpp"
#include "support/oracle.hpp"

using namespace fistalab;

namespace {

SolverConfig base_config(const CompositeProblem& p, long iters) {
  SolverConfig c;
  c.rule = StepRule::nesterov();
  c.lambda = 1.0 / p.smooth->smoothness();
  c.max_iter = iters;
  c.x0 = Vec(static_cast<std::size_t>(p.dim()), 1.0);
  c.x1 = c.x0;
  return c;
}

}  // namespace

TEST_CASE("a single step records x0, x1, x2 and the ravine point y1") {
  const CompositeProblem p = make_catalog_problem("quadratic-spd", 3, 1);
  SolverConfig c = base_config(p, 1);
  const SolverTrace trace = run_solver(p, c);

  CHECK(trace.steps == 1);
  CHECK(trace.ks == std::vector<long>{0, 1, 2});
  REQUIRE(trace.xs.size() == 3);
  CHECK(trace.xs[0] == c.x0);
  CHECK(trace.xs[1] == c.x1);
  CHECK(trace.y_ks == std::vector<long>{1});

  // With x1 = x0 the first extrapolation is a no-op, so x2 is one plain
  // proximal-gradient step from x1.
  CHECK(trace.ys[0] == c.x1);
  Vec g, expect;
  p.smooth->gradient(c.x1, g);
  vecops::gradient_step(c.x1, g, c.lambda, expect);
  CHECK(trace.xs[2] == expect);

  CHECK(trace.t_values.size() == 2);
  CHECK(trace.t(1) == 1.0);
  CHECK(trace.vels.size() == 2);
  CHECK(trace.vels[0] == 0.0);
  REQUIRE(trace.has_gaps);
  CHECK(trace.gaps.size() == 3);
}

TEST_CASE("the step-size contract rejects lambda beyond 1/L") {
  const CompositeProblem p = make_catalog_problem("quadratic-spd", 3, 1);
  SolverConfig c = base_config(p, 10);
  c.lambda = 2.0 / p.smooth->smoothness();
  CHECK_THROWS_AS(run_solver(p, c), ConfigError);
  // Exactly 1/L is inside the contract.
  c.lambda = 1.0 / p.smooth->smoothness();
  CHECK_NOTHROW(run_solver(p, c));
}

TEST_CASE("configuration validation") {
  const CompositeProblem p = make_catalog_problem("quadratic-spd", 3, 1);
  SolverConfig good = base_config(p, 5);

  SolverConfig c = good;
  c.x0 = Vec(2, 0.0);
  CHECK_THROWS_AS(run_solver(p, c), ConfigError);
  c = good;
  c.max_iter = 0;
  CHECK_THROWS_AS(run_solver(p, c), ConfigError);
  c = good;
  c.lambda = 0.0;
  CHECK_THROWS_AS(run_solver(p, c), ConfigError);
  c = good;
  c.record_every = 0;
  CHECK_THROWS_AS(run_solver(p, c), ConfigError);
  c = good;
  c.x1[0] = std::nan("");
  CHECK_THROWS_AS(run_solver(p, c), ConfigError);
  c = good;
  c.grad_tol = -1.0;
  CHECK_THROWS_AS(run_solver(p, c), ConfigError);
}

TEST_CASE("identical inputs give byte-identical traces") {
  const CompositeProblem p = make_catalog_problem("lasso", 5, 42);
  SolverConfig c = base_config(p, 300);
  c.rule = StepRule::general_theta(0.5);
  const SolverTrace a = run_solver(p, c);
  const SolverTrace b = run_solver(p, c);
  CHECK(a.xs == b.xs);
  CHECK(a.ys == b.ys);
  CHECK(a.gaps == b.gaps);
  CHECK(a.vels == b.vels);
  CHECK(a.t_values == b.t_values);
}

TEST_CASE("one gradient evaluation per iteration") {
  const CompositeProblem base = make_catalog_problem("least-squares", 6, 3);
  auto counter = std::make_shared<oracle::CountingSmooth>(base.smooth);
  CompositeProblem p = base;
  p.smooth = counter;
  SolverConfig c = base_config(p, 57);
  run_solver(p, c);
  CHECK(counter->grad_calls() == 57);
}

TEST_CASE("the solver matches an independent reference loop bit for bit") {
  for (const char* name : {"quadratic-spd", "lasso", "logistic-l2"}) {
    const CompositeProblem p = make_catalog_problem(name, 5, 7);
    for (const StepRule& rule : {StepRule::nesterov(), StepRule::chambolle_dossal(3.0)}) {
      SolverConfig c = base_config(p, 400);
      c.rule = rule;
      c.x0 = Vec(5, 0.5);
      c.x1 = Vec(5, 0.0);
      const SolverTrace trace = run_solver(p, c);
      const auto tseq = generate_tseq(rule, c.max_iter + 1);
      const Vec ref = oracle::naive_accelerated(p, c.x0, c.x1, tseq.values, c.lambda, 400);
      INFO(name, " / ", rule.name());
      CHECK(trace.xs.back() == ref);
    }
  }
}

TEST_CASE("divergent runs abort with a numeric error") {
  const CompositeProblem p = make_catalog_problem("quadratic-spd", 3, 1);
  SolverConfig c = base_config(p, 5000);
  c.lambda = 4.0 / p.smooth->smoothness();
  c.x0 = Vec(3, 1.0);
  c.x1 = Vec(3, 0.9);
  CHECK_THROWS_AS(detail::run_without_step_contract(p, c), NumericError);
  try {
    detail::run_without_step_contract(p, c);
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("iteration") != std::string::npos);
  }
}

TEST_CASE("grad_tol exits early with consistent series lengths") {
  const CompositeProblem p = make_catalog_problem("quadratic-spd", 4, 2);
  SolverConfig c = base_config(p, 100000);
  c.grad_tol = 1e-6;
  const SolverTrace trace = run_solver(p, c);
  CHECK(trace.steps < 100000);
  CHECK(trace.steps > 10);
  CHECK(trace.t_values.size() == static_cast<std::size_t>(trace.steps + 1));
  CHECK(trace.vels.size() == static_cast<std::size_t>(trace.steps + 1));
  CHECK(trace.gaps.size() == static_cast<std::size_t>(trace.steps + 2));
  CHECK(trace.ks.back() == trace.steps + 1);
  CHECK(trace.y_ks.back() == trace.steps);
}

TEST_CASE("record_every thins iterates but never the scalar series") {
  const CompositeProblem p = make_catalog_problem("quadratic-spd", 3, 1);
  SolverConfig c = base_config(p, 25);
  c.record_every = 10;
  const SolverTrace trace = run_solver(p, c);
  CHECK(trace.ks == std::vector<long>{0, 1, 10, 20, 26});
  CHECK(trace.y_ks == std::vector<long>{1, 10, 20, 25});
  CHECK(trace.t_values.size() == 26);
  CHECK(trace.vels.size() == 26);
  CHECK(trace.gaps.size() == 27);

  // The thinned iterates equal the dense run's at the same indices.
  c.record_every = 1;
  const SolverTrace dense = run_solver(p, c);
  for (std::size_t i = 0; i < trace.ks.size(); ++i) {
    const long k = trace.ks[i];
    CHECK(trace.xs[i] == dense.xs[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("step() agrees with the batch run") {
  const CompositeProblem p = make_catalog_problem("huber", 4, 5);
  SolverConfig c = base_config(p, 6);
  c.x0 = Vec(4, 2.0);
  c.x1 = Vec(4, 1.5);
  const SolverTrace trace = run_solver(p, c);

  const auto tseq = generate_tseq(c.rule, 2);
  IterateState s;
  s.k = 1;
  s.x_prev = c.x0;
  s.x = c.x1;
  s.t = tseq.t(1);
  s.t_next = tseq.t(2);
  for (int i = 0; i < 5; ++i) s = step(s, p, c);
  CHECK(s.k == 6);
  CHECK(s.x == trace.xs[6]);
  CHECK(s.t == trace.t(6));
}

TEST_CASE("gap series is the objective gap of the stored iterates") {
  const CompositeProblem p = make_catalog_problem("least-squares", 4, 3);
  SolverConfig c = base_config(p, 150);
  const SolverTrace trace = run_solver(p, c);
  for (std::size_t i = 0; i < trace.ks.size(); ++i) {
    const long k = trace.ks[i];
    CHECK(trace.gaps[static_cast<std::size_t>(k)] == p.objective_gap(trace.xs[i]));
  }
  // The run makes real progress end to end.
  CHECK(trace.gaps.back() < 1e-10 * trace.gaps.front());
}

TEST_CASE("ravine points pair indices with stored vectors") {
  const CompositeProblem p = make_catalog_problem("quadratic-spd", 3, 1);
  const SolverTrace trace = run_solver(p, base_config(p, 8));
  const auto pts = ravine_points(trace);
  REQUIRE(pts.size() == trace.y_ks.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].first == trace.y_ks[i]);
    CHECK(pts[i].second == trace.ys[i]);
  }
}
