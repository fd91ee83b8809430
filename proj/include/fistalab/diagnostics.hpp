#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fistalab/problems.hpp"
#include "fistalab/report.hpp"
#include "fistalab/solver.hpp"

namespace fistalab {

// Per-index certificate quantities measured along a run, relative to a fixed
// minimizer z. With gap_k = F(x_k) - F* and vel_k = ||x_k - x_{k-1}||:
//
//   z_k = x_{k-1} + t_k (x_k - x_{k-1})
//   u_k = z_k + theta (x_k - x_{k-1})
//   s_k = t_k^2 + theta t_k
//   W_k = lambda gap_k + vel_k^2 / 2
//   E_k = lambda t_k^2 gap_k + ||z_k - z||^2 / 2
//   h_k = ||x_k - z||^2 / 2
//
// The energies carry the step-size weight so their decrease holds for every
// admissible step 0 < lambda <= 1/L; at lambda = 1 they reduce to the
// unweighted forms.
struct LyapunovRecord {
  long k = 0;
  double t = 0.0;
  double s = 0.0;
  double gap = 0.0;
  double vel = 0.0;
  double W = 0.0;
  double E = 0.0;
  double h = 0.0;
  Vec z_point;
  Vec u_point;
};

struct LyapunovSeries {
  std::vector<LyapunovRecord> records;  // k = 1 .. steps+1
  double theta = 0.0;
  bool theta_known = true;  // false: rule pins no theta, series built with 0
  double lambda = 0.0;
  Vec z;
  // Worst relative disagreement between s_k = t_k^2 + theta t_k and the
  // compensated cumulative form theta + sum_{i<=k} t_i.
  double s_form_disagreement = 0.0;
};

// Requires an unthinned trace (record_every = 1) and a known optimal value.
LyapunovSeries lyapunov_series(const SolverTrace& trace, const Vec& z,
                               std::optional<double> theta);

// W and E must be nonincreasing. Violation at k is max(0, value_{k+1} -
// value_k); tolerance 1e-10 max(1, first value).
std::pair<CheckReport, CheckReport> check_monotone(const LyapunovSeries& series);

// lambda t_k^2 gap_k <= E_1, and when the rule pins theta also
// lambda gap_k (1-theta)^2 (k+1)^2 / 4 <= E_1. Tolerance 1e-10 max(1, E_1).
CheckReport check_rate(const LyapunovSeries& series);

// Reconstructs x_k = (theta x_0 + sum_{i<=k} t_i u_i) / s_k with compensated
// accumulation and checks it against the stored iterate, allowance
// 1e-8 k max_{i<=k} ||u_i||; the weights must also sum to 1 within 1e-12 k.
// Reports the worst excess over the allowance (tolerance 0).
CheckReport ergodic_reconstruct(const SolverTrace& trace, double theta);

struct BoundsReport {
  CheckReport iterates;  // ||x_k - z|| <= C_z
  CheckReport averaged;  // ||u_k - z|| <= C_z
  CheckReport velocity;  // t_k vel_k <= sqrt(2 E_1) + C_z, and vel_k by /t_k
  double c_z = 0.0;      // sqrt(2 E_1) + theta sqrt(2 W_1)
};

// The three trajectory bounds; they lean on the exact recurrence, so a rule
// with unknown theta yields skipped reports.
BoundsReport check_bounds(const LyapunovSeries& series);

// Difference quantities against a second minimizer v:
//   R_k = h_{z,k} - h_{v,k},  D_k = E_{z,k} - E_{v,k}
struct TwoPointRecord {
  long k = 0;
  double R = 0.0;
  double D = 0.0;
};

struct TwoPointResult {
  std::vector<TwoPointRecord> records;  // k = 1 .. K
  // D_k = (t_k - 1) <x_k - x_{k-1}, v - z> + R_k
  CheckReport identity_D;
  // R_{k+1} - R_k = <x_{k+1} - x_k, v - z>
  CheckReport identity_dR;
  // |R_K - D_K| within the velocity-identity bound and the tail window.
  CheckReport tail;
  // The weighted running mean of the drive terms D_i + theta (R_i - R_{i-1})
  // telescopes back to R_k exactly; checked per index when theta is pinned.
  std::optional<CheckReport> cesaro_mean;
  double d_star_empirical = 0.0;   // D_K
  double d_star_limit_form = 0.0;  // <x_K - v, v - z> + ||v - z||^2 / 2
  double eps_tail = 0.0;           // (sqrt(2 E_{z,1}) + C_z) ||v - z|| / t_K
  double r_final = 0.0;
};

// z and v must be distinct verified minimizers; throws otherwise.
TwoPointResult two_point_series(const SolverTrace& trace, const CompositeProblem& problem,
                                const Vec& z, const Vec& v, std::optional<double> theta);

// Compensated partial sums of t_{i+1} gap_i and t_i vel_i^2. Their
// boundedness witnesses the series convergence; informational only.
struct SummabilityReport {
  std::vector<double> partial_gap_sum;  // k = 1 .. steps
  std::vector<double> partial_vel_sum;  // k = 1 .. steps+1
  CheckReport note;
};

SummabilityReport summability_report(const SolverTrace& trace);

// Convergence of the iterates themselves: a Cauchy-style probe
// ||x_K - x_{K/2}||, plus the distance from x_K to the known minimizer set
// (exact projection when the set's flat directions are known). Requires at
// least 1e4 steps; below that the report comes back skipped.
CheckReport convergence_probe(const SolverTrace& trace, const CompositeProblem& problem,
                              std::optional<double> theta);

}  // namespace fistalab
