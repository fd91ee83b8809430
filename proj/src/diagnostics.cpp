#include "fistalab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fistalab/errors.hpp"
#include "fistalab/kahan.hpp"
#include "fistalab/textio.hpp"

namespace fistalab {

namespace {

// Checks index k of the stored iterates; diagnostics need every index.
void require_dense(const SolverTrace& trace) {
  const long count = trace.steps + 2;  // x_0 .. x_{steps+1}
  if (static_cast<long>(trace.ks.size()) != count) {
    throw ConfigError("diagnostics need an unthinned trace (record_every = 1)");
  }
  for (long i = 0; i < count; ++i) {
    if (trace.ks[static_cast<std::size_t>(i)] != i) {
      throw ConfigError("diagnostics need an unthinned trace (record_every = 1)");
    }
  }
}

void require_gaps(const SolverTrace& trace, const char* who) {
  if (!trace.has_gaps) {
    throw ConfigError(std::string(who) + " needs a trace with objective gaps (known optimal value)");
  }
}

const Vec& x_at(const SolverTrace& trace, long k) {
  return trace.xs[static_cast<std::size_t>(k)];
}

// z_k = x_{k-1} + t_k (x_k - x_{k-1}), written into out.
void z_of(const Vec& x_prev, const Vec& x, double t, Vec& out) {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x_prev[i] + t * (x[i] - x_prev[i]);
}

bool is_stationary(const CompositeProblem& problem, const Vec& p) {
  Vec g;
  problem.smooth->gradient(p, g);
  if (problem.nonsmooth) {
    const double lambda = 1.0 / problem.smooth->smoothness();
    Vec w, q;
    vecops::gradient_step(p, g, lambda, w);
    problem.nonsmooth->prox(lambda, w, q);
    return vecops::dist(q, p) <= 1e-8 * std::max(1.0, vecops::norm(p));
  }
  return vecops::norm(g) <= 1e-8 * std::max(1.0, problem.smooth->smoothness());
}

}  // namespace

LyapunovSeries lyapunov_series(const SolverTrace& trace, const Vec& z,
                               std::optional<double> theta) {
  require_dense(trace);
  require_gaps(trace, "lyapunov_series");
  if (z.size() != x_at(trace, 0).size()) throw ConfigError("reference point dimension mismatch");

  LyapunovSeries series;
  series.theta_known = theta.has_value();
  series.theta = theta.value_or(0.0);
  series.lambda = trace.config.lambda;
  series.z = z;

  const long K = trace.steps + 1;
  series.records.reserve(static_cast<std::size_t>(K));
  CompensatedSum t_cum(series.theta);
  Vec zk;
  for (long k = 1; k <= K; ++k) {
    const Vec& xp = x_at(trace, k - 1);
    const Vec& x = x_at(trace, k);
    LyapunovRecord rec;
    rec.k = k;
    rec.t = trace.t(k);
    rec.s = rec.t * rec.t + series.theta * rec.t;
    rec.gap = trace.gaps[static_cast<std::size_t>(k)];
    rec.vel = trace.vels[static_cast<std::size_t>(k - 1)];
    z_of(xp, x, rec.t, zk);
    rec.z_point = zk;
    rec.u_point.resize(zk.size());
    for (std::size_t i = 0; i < zk.size(); ++i) {
      rec.u_point[i] = zk[i] + series.theta * (x[i] - xp[i]);
    }
    const double dz = vecops::dist(zk, z);
    rec.W = series.lambda * rec.gap + 0.5 * rec.vel * rec.vel;
    rec.E = series.lambda * rec.t * rec.t * rec.gap + 0.5 * dz * dz;
    const double dx = vecops::dist(x, z);
    rec.h = 0.5 * dx * dx;

    t_cum.add(rec.t);
    series.s_form_disagreement =
        std::max(series.s_form_disagreement, std::abs(rec.s - t_cum.value()) / rec.s);
    series.records.push_back(std::move(rec));
  }
  return series;
}

std::pair<CheckReport, CheckReport> check_monotone(const LyapunovSeries& series) {
  const auto& rs = series.records;
  auto scan = [&](const char* name, auto field) {
    double worst = 0.0;
    std::optional<long> at;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
      const double rise = field(rs[i + 1]) - field(rs[i]);
      if (rise > worst) {
        worst = rise;
        at = rs[i].k;
      }
    }
    const double first = rs.empty() ? 0.0 : field(rs.front());
    return make_check(name, worst, at, 1e-10 * std::max(1.0, first),
                      "largest one-step increase; tolerance 1e-10 max(1, first value)");
  };
  return {scan("monotone-W", [](const LyapunovRecord& r) { return r.W; }),
          scan("monotone-E", [](const LyapunovRecord& r) { return r.E; })};
}

CheckReport check_rate(const LyapunovSeries& series) {
  const auto& rs = series.records;
  if (rs.empty()) throw ConfigError("empty series");
  const double E1 = rs.front().E;
  const double lambda = series.lambda;
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<long> at;
  for (const auto& r : rs) {
    double lhs = lambda * r.t * r.t * r.gap;
    if (series.theta_known) {
      const double om = 1.0 - series.theta;
      const double kk = static_cast<double>(r.k + 1);
      lhs = std::max(lhs, lambda * r.gap * om * om * kk * kk / 4.0);
    }
    if (lhs - E1 > worst) {
      worst = lhs - E1;
      at = r.k;
    }
  }
  std::string details = "lambda t^2 gap against the initial energy";
  if (series.theta_known) {
    details += ", and the index form via t_k >= (1-theta)(k+1)/2";
  } else {
    details += "; index form skipped (rule pins no theta)";
  }
  return make_check("rate-bound", worst, at, 1e-10 * std::max(1.0, E1), details);
}

CheckReport ergodic_reconstruct(const SolverTrace& trace, double theta) {
  require_dense(trace);
  const long K = trace.steps + 1;
  const Vec& x0 = x_at(trace, 0);
  const std::size_t d = x0.size();

  CompensatedVec acc(d);
  acc.add_scaled(theta, x0);
  CompensatedSum wsum(theta);
  double umax = vecops::norm(x0);
  double worst = -std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  std::optional<long> at;
  Vec zk, uk(d);
  for (long k = 1; k <= K; ++k) {
    const Vec& xp = x_at(trace, k - 1);
    const Vec& x = x_at(trace, k);
    const double t = trace.t(k);
    z_of(xp, x, t, zk);
    for (std::size_t i = 0; i < d; ++i) uk[i] = zk[i] + theta * (x[i] - xp[i]);
    acc.add_scaled(t, uk);
    wsum.add(t);
    umax = std::max(umax, vecops::norm(uk));
    const double s = t * t + theta * t;

    Vec xhat = acc.value();
    for (std::size_t i = 0; i < d; ++i) xhat[i] /= s;
    const double err = vecops::dist(xhat, x);
    const double allow_err = 1e-8 * static_cast<double>(k) * std::max(umax, 1e-300);
    const double dev = std::abs(wsum.value() / s - 1.0);
    const double allow_dev = 1e-12 * static_cast<double>(k);
    const double excess = std::max(err - allow_err, dev - allow_dev);
    if (excess > worst) {
      worst = excess;
      at = k;
    }
    worst_ratio = std::max(worst_ratio, err / allow_err);
  }
  return make_check("ergodic-representation", worst, at, 0.0,
                    "excess over allowances 1e-8 k max_i||u_i|| (reconstruction) and "
                    "1e-12 k (weight sum); worst reconstruction ratio " +
                        fmt17(worst_ratio));
}

BoundsReport check_bounds(const LyapunovSeries& series) {
  BoundsReport out;
  if (!series.theta_known) {
    const std::string why = "rule pins no theta; these bounds lean on the exact recurrence";
    out.iterates = make_skipped("bound-iterates", why);
    out.averaged = make_skipped("bound-averaged", why);
    out.velocity = make_skipped("bound-velocity", why);
    return out;
  }
  const auto& rs = series.records;
  if (rs.empty()) throw ConfigError("empty series");
  const double E1 = rs.front().E;
  const double W1 = rs.front().W;
  const double root2E = std::sqrt(2.0 * E1);
  const double cz = root2E + series.theta * std::sqrt(2.0 * W1);
  const double vbound = root2E + cz;
  out.c_z = cz;
  const double tol = 1e-10 * std::max(1.0, cz);

  double worst_x = -std::numeric_limits<double>::infinity();
  double worst_u = worst_x, worst_v = worst_x;
  std::optional<long> at_x, at_u, at_v;
  for (const auto& r : rs) {
    const double xdist = std::sqrt(2.0 * r.h);
    if (xdist - cz > worst_x) {
      worst_x = xdist - cz;
      at_x = r.k;
    }
    const double udist = vecops::dist(r.u_point, series.z);
    if (udist - cz > worst_u) {
      worst_u = udist - cz;
      at_u = r.k;
    }
    const double v = std::max(r.t * r.vel - vbound, r.vel - vbound / r.t);
    if (v > worst_v) {
      worst_v = v;
      at_v = r.k;
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "C_z=%.12g sqrt(2E_1)=%.12g", cz, root2E);
  out.iterates = make_check("bound-iterates", worst_x, at_x, tol, detail);
  out.averaged = make_check("bound-averaged", worst_u, at_u, tol, detail);
  out.velocity = make_check("bound-velocity", worst_v, at_v, tol,
                            std::string("t vel against sqrt(2E_1)+C_z; ") + detail);
  return out;
}

TwoPointResult two_point_series(const SolverTrace& trace, const CompositeProblem& problem,
                                const Vec& z, const Vec& v, std::optional<double> theta) {
  require_dense(trace);
  require_gaps(trace, "two_point_series");
  const std::size_t d = x_at(trace, 0).size();
  if (z.size() != d || v.size() != d) throw ConfigError("reference point dimension mismatch");
  Vec vmz;
  vecops::sub(v, z, vmz);
  const double nvmz = vecops::norm(vmz);
  if (!(nvmz > 0.0)) throw ConfigError("two-point diagnostics need distinct minimizers");
  if (!is_stationary(problem, z) || !is_stationary(problem, v)) {
    throw ConfigError("two-point diagnostics need two verified minimizers");
  }

  const double lambda = trace.config.lambda;
  const double th = theta.value_or(0.0);
  const long K = trace.steps + 1;

  TwoPointResult out;
  out.records.reserve(static_cast<std::size_t>(K));

  const double r0 = 0.5 * (std::pow(vecops::dist(x_at(trace, 0), z), 2) -
                           std::pow(vecops::dist(x_at(trace, 0), v), 2));

  std::vector<double> vel_dot(static_cast<std::size_t>(K) + 1, 0.0);  // <x_k - x_{k-1}, v - z>
  double scale0 = 1.0;
  double hmax = 1.0;
  Vec zk;
  for (long k = 1; k <= K; ++k) {
    const Vec& xp = x_at(trace, k - 1);
    const Vec& x = x_at(trace, k);
    const double t = trace.t(k);
    const double gap = trace.gaps[static_cast<std::size_t>(k)];
    z_of(xp, x, t, zk);
    const double dz = vecops::dist(zk, z);
    const double dv = vecops::dist(zk, v);
    const double Ez = lambda * t * t * gap + 0.5 * dz * dz;
    const double Ev = lambda * t * t * gap + 0.5 * dv * dv;
    const double hz = 0.5 * std::pow(vecops::dist(x, z), 2);
    const double hv = 0.5 * std::pow(vecops::dist(x, v), 2);
    hmax = std::max({hmax, hz, hv});
    if (k == 1) scale0 = std::max({1.0, Ez, Ev});
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += (x[i] - xp[i]) * vmz[i];
    vel_dot[static_cast<std::size_t>(k)] = dot;
    out.records.push_back({k, hz - hv, Ez - Ev});
  }

  // (i) D_k = (t_k - 1) <x_k - x_{k-1}, v - z> + R_k
  {
    double worst = -std::numeric_limits<double>::infinity();
    std::optional<long> at;
    for (const auto& rec : out.records) {
      const double t = trace.t(rec.k);
      const double resid =
          std::abs(rec.D - ((t - 1.0) * vel_dot[static_cast<std::size_t>(rec.k)] + rec.R));
      if (resid > worst) {
        worst = resid;
        at = rec.k;
      }
    }
    out.identity_D = make_check("two-point-identity-D", worst, at, 1e-10 * scale0,
                                "energy difference against its momentum form");
  }

  // (ii) R_{k+1} - R_k = <x_{k+1} - x_k, v - z>
  {
    double worst = -std::numeric_limits<double>::infinity();
    std::optional<long> at;
    for (std::size_t i = 0; i + 1 < out.records.size(); ++i) {
      const double resid = std::abs((out.records[i + 1].R - out.records[i].R) -
                                    vel_dot[static_cast<std::size_t>(out.records[i + 1].k)]);
      if (resid > worst) {
        worst = resid;
        at = out.records[i].k;
      }
    }
    out.identity_dR = make_check("two-point-identity-dR", worst, at,
                                 1e-10 * std::max(1.0, hmax),
                                 "anchor-difference increments against the step inner product");
  }

  // Weighted running mean of the drive terms; telescopes back to R_k.
  if (theta.has_value()) {
    CompensatedSum num(th * r0);
    double runmax_r = std::max(1.0, std::abs(r0));
    double worst = -std::numeric_limits<double>::infinity();
    std::optional<long> at;
    double prev_r = r0;
    for (const auto& rec : out.records) {
      const double t = trace.t(rec.k);
      num.add(t * (rec.D + th * (rec.R - prev_r)));
      prev_r = rec.R;
      runmax_r = std::max(runmax_r, std::abs(rec.R));
      const double s = t * t + th * t;
      const double excess =
          std::abs(num.value() / s - rec.R) -
          (1e-10 + 1e-15 * static_cast<double>(rec.k)) * runmax_r;
      if (excess > worst) {
        worst = excess;
        at = rec.k;
      }
    }
    out.cesaro_mean = make_check(
        "two-point-cesaro", worst, at, 0.0,
        "weighted mean of drive terms against R_k; allowance (1e-10 + 1e-15 k) max|R|");
  }

  // Tail: R and D approach each other at the rate the velocity dies.
  {
    const double tK = trace.t(K);
    const double velK = trace.vels[static_cast<std::size_t>(K - 1)];
    const double gap1 = trace.gaps[1];
    const double vel1 = trace.vels[0];
    z_of(x_at(trace, 0), x_at(trace, 1), trace.t(1), zk);
    const double Ez1 = lambda * trace.t(1) * trace.t(1) * gap1 +
                       0.5 * std::pow(vecops::dist(zk, z), 2);
    const double W1 = lambda * gap1 + 0.5 * vel1 * vel1;
    const double root2E = std::sqrt(2.0 * Ez1);
    const double cz = root2E + th * std::sqrt(2.0 * W1);
    out.eps_tail = (root2E + cz) * nvmz / tK;

    const double diff = std::abs(out.records.back().R - out.records.back().D);
    const double identity_bound = (tK - 1.0) * velK * nvmz + 1e-10 * scale0;
    const double excess = std::max(diff - identity_bound, diff - (out.eps_tail + 1e-12 * scale0));
    out.d_star_empirical = out.records.back().D;
    out.r_final = out.records.back().R;
    const Vec& xK = x_at(trace, K);
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += (xK[i] - v[i]) * vmz[i];
    out.d_star_limit_form = dot + 0.5 * nvmz * nvmz;
    out.tail = make_check(
        "two-point-tail", excess, K, 0.0,
        "|R_K - D_K| against the velocity identity bound " + fmt17(identity_bound) +
            " and the tail window eps_tail=" + fmt17(out.eps_tail) +
            " (window derived from trajectory bounds, not an asserted theorem); D_K=" +
            fmt17(out.d_star_empirical) + " limit form " + fmt17(out.d_star_limit_form));
  }

  return out;
}

SummabilityReport summability_report(const SolverTrace& trace) {
  require_dense(trace);
  SummabilityReport out;
  const long K = trace.steps + 1;
  CompensatedSum vel_sum;
  for (long k = 1; k <= K; ++k) {
    const double vel = trace.vels[static_cast<std::size_t>(k - 1)];
    vel_sum.add(trace.t(k) * vel * vel);
    out.partial_vel_sum.push_back(vel_sum.value());
  }
  if (trace.has_gaps) {
    CompensatedSum gap_sum;
    for (long k = 1; k <= trace.steps; ++k) {
      gap_sum.add(trace.t(k + 1) * trace.gaps[static_cast<std::size_t>(k)]);
      out.partial_gap_sum.push_back(gap_sum.value());
    }
  }
  auto ratio = [](const std::vector<double>& s) {
    if (s.size() < 4) return 0.0;
    const double half = s[s.size() / 2 - 1];
    return half != 0.0 ? s.back() / half : 0.0;
  };
  std::string details = "informational; bounded partial sums witness summability. ";
  details += "sum t vel^2 = " + fmt17(out.partial_vel_sum.back()) +
             " (x2 growth ratio " + fmt17(ratio(out.partial_vel_sum)) + ")";
  if (!out.partial_gap_sum.empty()) {
    details += "; sum t gap = " + fmt17(out.partial_gap_sum.back()) + " (x2 growth ratio " +
               fmt17(ratio(out.partial_gap_sum)) + ")";
  }
  out.note = make_check("summability", 0.0, std::nullopt, 0.0, details);
  return out;
}

CheckReport convergence_probe(const SolverTrace& trace, const CompositeProblem& problem,
                              std::optional<double> theta) {
  if (trace.steps < 10000) {
    return make_skipped("convergence-probe", "needs at least 1e4 steps, have " +
                                                 std::to_string(trace.steps));
  }
  require_dense(trace);
  if (problem.known_minimizers.empty()) {
    return make_skipped("convergence-probe", "problem exposes no minimizer");
  }
  require_gaps(trace, "convergence_probe");

  const double th = theta.value_or(0.0);
  const double lambda = trace.config.lambda;
  const long K = trace.steps + 1;
  const long mid = K / 2;
  const Vec& z = problem.known_minimizers.front();

  Vec zk;
  z_of(x_at(trace, 0), x_at(trace, 1), trace.t(1), zk);
  const double gap1 = trace.gaps[1];
  const double vel1 = trace.vels[0];
  const double E1 = lambda * gap1 + 0.5 * std::pow(vecops::dist(zk, z), 2);
  const double W1 = lambda * gap1 + 0.5 * vel1 * vel1;
  const double cz = std::sqrt(2.0 * E1) + th * std::sqrt(2.0 * W1);

  const double cauchy = vecops::dist(x_at(trace, K), x_at(trace, mid));
  const double allow_cauchy = 10.0 * cz / trace.t(mid);

  double dist;
  if (problem.minimizer_set && !problem.minimizer_set->null_basis.empty()) {
    Vec diff;
    vecops::sub(x_at(trace, K), problem.minimizer_set->point, diff);
    for (const Vec& b : problem.minimizer_set->null_basis) {
      const double c = vecops::dot(diff, b);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= c * b[i];
    }
    dist = vecops::norm(diff);
  } else {
    dist = std::numeric_limits<double>::infinity();
    for (const Vec& m : problem.known_minimizers) {
      dist = std::min(dist, vecops::dist(x_at(trace, K), m));
    }
  }
  double allow_dist;
  std::string dist_label;
  if (problem.gap_curvature) {
    allow_dist = std::sqrt(2.0 * E1 / (lambda * *problem.gap_curvature)) / trace.t(K) + 1e-12;
    dist_label = "rate-derived";
  } else {
    allow_dist = 10.0 * cz / trace.t(K);
    dist_label = "heuristic";
  }

  const double worst = std::max(cauchy - allow_cauchy, dist - allow_dist);
  return make_check(
      "convergence-probe", worst, K, 0.0,
      "||x_K - x_{K/2}||=" + fmt17(cauchy) + " vs heuristic window " + fmt17(allow_cauchy) +
          "; dist(x_K, argmin)=" + fmt17(dist) + " vs " + dist_label + " window " +
          fmt17(allow_dist));
}

}  // namespace fistalab
