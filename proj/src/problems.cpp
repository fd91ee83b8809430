#include "fistalab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fistalab/errors.hpp"
#include "fistalab/kahan.hpp"
#include "fistalab/rng.hpp"
#include "fistalab/textio.hpp"

namespace fistalab {

void matvec(const DenseMatrix& A, const Vec& x, Vec& out) {
  out.assign(static_cast<std::size_t>(A.rows), 0.0);
  for (long i = 0; i < A.rows; ++i) {
    double acc = 0.0;
    for (long j = 0; j < A.cols; ++j) acc += A.at(i, j) * x[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
}

void matvec_transposed(const DenseMatrix& A, const Vec& x, Vec& out) {
  out.assign(static_cast<std::size_t>(A.cols), 0.0);
  for (long j = 0; j < A.cols; ++j) {
    double acc = 0.0;
    for (long i = 0; i < A.rows; ++i) acc += A.at(i, j) * x[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(j)] = acc;
  }
}

void soft_threshold(const Vec& y, double tau, Vec& out) {
  out.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i]) - tau;
    out[i] = a > 0.0 ? std::copysign(a, y[i]) : 0.0;
  }
}

L1Norm::L1Norm(double tau) : tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("l1 weight must be positive");
}

double L1Norm::value(const Vec& x) const {
  double acc = 0.0;
  for (double v : x) acc += std::abs(v);
  return tau_ * acc;
}

void L1Norm::prox(double lambda, const Vec& y, Vec& out) const {
  soft_threshold(y, lambda * tau_, out);
}

BoxIndicator::BoxIndicator(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw ConfigError("box indicator needs lo < hi");
}

double BoxIndicator::value(const Vec& x) const {
  for (double v : x) {
    if (v < lo_ || v > hi_) return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

void BoxIndicator::prox(double /*lambda*/, const Vec& y, Vec& out) const {
  out.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::min(std::max(y[i], lo_), hi_);
}

namespace {

constexpr double kMinimizerGradTol = 1e-10;
// Dense eigenbasis assembly perturbs the spectrum by O(dim * eps); the
// declared smoothness carries this cushion so 1/L steps stay inside the
// contract of the assembled operator. Diagonal instances are exact and
// take no cushion.
constexpr double kAssemblyCushion = 1.0 + 1e-12;

// ---------------------------------------------------------------------------
// smooth objectives over a shared blueprint

class QuadraticObjective : public SmoothObjective {
 public:
  explicit QuadraticObjective(std::shared_ptr<const ProblemData> d) : d_(std::move(d)) {}

  long dim() const override { return d_->dim; }

  double value(const Vec& x) const override {
    Vec qx;
    matvec(d_->matrix, x, qx);
    return 0.5 * vecops::dot(x, qx);
  }

  void gradient(const Vec& x, Vec& g) const override { matvec(d_->matrix, x, g); }

  double smoothness() const override { return d_->smoothness; }

 private:
  std::shared_ptr<const ProblemData> d_;
};

class LeastSquaresObjective : public SmoothObjective {
 public:
  explicit LeastSquaresObjective(std::shared_ptr<const ProblemData> d) : d_(std::move(d)) {}

  long dim() const override { return d_->dim; }

  double value(const Vec& x) const override {
    Vec r;
    residual(x, r);
    return 0.5 * vecops::dot(r, r);
  }

  void gradient(const Vec& x, Vec& g) const override {
    Vec r;
    residual(x, r);
    matvec_transposed(d_->matrix, r, g);
  }

  double smoothness() const override { return d_->smoothness; }

  void residual(const Vec& x, Vec& r) const {
    matvec(d_->matrix, x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= d_->rhs[i];
  }

 private:
  std::shared_ptr<const ProblemData> d_;
};

class HuberObjective : public SmoothObjective {
 public:
  explicit HuberObjective(std::shared_ptr<const ProblemData> d) : d_(std::move(d)) {}

  long dim() const override { return d_->dim; }

  double value(const Vec& x) const override {
    Vec r;
    residual(x, r);
    const double delta = d_->delta;
    double acc = 0.0;
    for (double v : r) {
      const double a = std::abs(v);
      acc += a <= delta ? 0.5 * v * v : delta * a - 0.5 * delta * delta;
    }
    return acc;
  }

  void gradient(const Vec& x, Vec& g) const override {
    Vec r;
    residual(x, r);
    const double delta = d_->delta;
    for (double& v : r) v = std::min(std::max(v, -delta), delta);
    matvec_transposed(d_->matrix, r, g);
  }

  double smoothness() const override { return d_->smoothness; }

 private:
  void residual(const Vec& x, Vec& r) const {
    matvec(d_->matrix, x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= d_->rhs[i];
  }

  std::shared_ptr<const ProblemData> d_;
};

double logistic_loss(double ym) {
  // log(1 + exp(-ym)) without overflow.
  const double s = -ym;
  return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

class LogisticRidgeObjective : public SmoothObjective {
 public:
  explicit LogisticRidgeObjective(std::shared_ptr<const ProblemData> d) : d_(std::move(d)) {}

  long dim() const override { return d_->dim; }

  // Mean logistic loss plus an l2 term. The per-sample losses are summed with
  // compensation so the value is reproducible to an ulp, which the
  // cancellation-sensitive objective-gap evaluation relies on.
  double value(const Vec& x) const override {
    Vec m;
    matvec(d_->matrix, x, m);
    CompensatedSum acc;
    for (std::size_t i = 0; i < m.size(); ++i) acc.add(logistic_loss(d_->rhs[i] * m[i]));
    const double n = static_cast<double>(d_->matrix.rows);
    return acc.value() / n + 0.5 * d_->ridge * vecops::dot(x, x);
  }

  void gradient(const Vec& x, Vec& g) const override {
    Vec m;
    matvec(d_->matrix, x, m);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double y = d_->rhs[i];
      m[i] = -y * sigmoid(-y * m[i]);
    }
    matvec_transposed(d_->matrix, m, g);
    const double n = static_cast<double>(d_->matrix.rows);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = g[j] / n + d_->ridge * x[j];
  }

  double smoothness() const override { return d_->smoothness; }

  // (1/n) X^T W X + ridge I with W = diag(sigma (1 - sigma)); used by the
  // construction-time Newton solve only.
  DenseMatrix hessian(const Vec& x) const {
    const long n = d_->matrix.rows;
    const long p = d_->matrix.cols;
    Vec m;
    matvec(d_->matrix, x, m);
    Vec w(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      const double s = sigmoid(-d_->rhs[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)]);
      w[static_cast<std::size_t>(i)] = s * (1.0 - s);
    }
    DenseMatrix H(p, p);
    for (long a = 0; a < p; ++a) {
      for (long b = a; b < p; ++b) {
        double acc = 0.0;
        for (long i = 0; i < n; ++i) {
          acc += w[static_cast<std::size_t>(i)] * d_->matrix.at(i, a) * d_->matrix.at(i, b);
        }
        acc /= static_cast<double>(n);
        if (a == b) acc += d_->ridge;
        H.at(a, b) = acc;
        H.at(b, a) = acc;
      }
    }
    return H;
  }

 private:
  std::shared_ptr<const ProblemData> d_;
};

// ---------------------------------------------------------------------------
// deterministic construction helpers

// Orthonormal columns from seeded uniform entries: entries are drawn row by
// row, then two rounds of modified Gram-Schmidt run in column order. The draw
// order is part of the reproducibility contract.
DenseMatrix orthonormal_columns(long rows, long cols, SeededRng& rng) {
  DenseMatrix M(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) M.at(i, j) = rng.symmetric();
  }
  for (long j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (long p = 0; p < j; ++p) {
        double r = 0.0;
        for (long i = 0; i < rows; ++i) r += M.at(i, p) * M.at(i, j);
        for (long i = 0; i < rows; ++i) M.at(i, j) -= r * M.at(i, p);
      }
    }
    double nrm2 = 0.0;
    for (long i = 0; i < rows; ++i) nrm2 += M.at(i, j) * M.at(i, j);
    const double nrm = std::sqrt(nrm2);
    if (!(nrm > 1e-8)) throw NumericError("degenerate random basis draw");
    for (long i = 0; i < rows; ++i) M.at(i, j) /= nrm;
  }
  return M;
}

// A_ij = sum_m U_im sigma_m V_jm, i.e. A = U diag(sigma) V^T.
DenseMatrix assemble_product(const DenseMatrix& U, const Vec& sigma, const DenseMatrix& V) {
  DenseMatrix A(U.rows, V.rows);
  for (long i = 0; i < A.rows; ++i) {
    for (long j = 0; j < A.cols; ++j) {
      double acc = 0.0;
      for (long m = 0; m < U.cols; ++m) acc += U.at(i, m) * sigma[static_cast<std::size_t>(m)] * V.at(j, m);
      A.at(i, j) = acc;
    }
  }
  return A;
}

// Q_ij = sum_m eig_m V_im V_jm, mirrored so symmetry is exact in binary.
DenseMatrix assemble_symmetric(const Vec& eigs, const DenseMatrix& V) {
  DenseMatrix Q(V.rows, V.rows);
  for (long i = 0; i < Q.rows; ++i) {
    for (long j = i; j < Q.cols; ++j) {
      double acc = 0.0;
      for (long m = 0; m < V.cols; ++m) acc += eigs[static_cast<std::size_t>(m)] * V.at(i, m) * V.at(j, m);
      Q.at(i, j) = acc;
      Q.at(j, i) = acc;
    }
  }
  return Q;
}

// In-place lower Cholesky factor of a symmetric positive definite matrix.
void cholesky_lower(DenseMatrix& M) {
  const long n = M.rows;
  for (long j = 0; j < n; ++j) {
    double d = M.at(j, j);
    for (long p = 0; p < j; ++p) d -= M.at(j, p) * M.at(j, p);
    if (!(d > 0.0)) throw NumericError("matrix is not positive definite");
    const double ljj = std::sqrt(d);
    M.at(j, j) = ljj;
    for (long i = j + 1; i < n; ++i) {
      double v = M.at(i, j);
      for (long p = 0; p < j; ++p) v -= M.at(i, p) * M.at(j, p);
      M.at(i, j) = v / ljj;
    }
  }
}

void cholesky_solve(const DenseMatrix& L, Vec& x) {
  const long n = L.rows;
  for (long i = 0; i < n; ++i) {
    double v = x[static_cast<std::size_t>(i)];
    for (long p = 0; p < i; ++p) v -= L.at(i, p) * x[static_cast<std::size_t>(p)];
    x[static_cast<std::size_t>(i)] = v / L.at(i, i);
  }
  for (long i = n - 1; i >= 0; --i) {
    double v = x[static_cast<std::size_t>(i)];
    for (long p = i + 1; p < n; ++p) v -= L.at(p, i) * x[static_cast<std::size_t>(p)];
    x[static_cast<std::size_t>(i)] = v / L.at(i, i);
  }
}

// ---------------------------------------------------------------------------
// construction-time solves

struct LassoSolution {
  Vec x;
  double optimal_value = 0.0;
  double duality_gap = 0.0;
};

// Cyclic coordinate descent with exact shrinkage steps, then a Cholesky
// polish on the detected support. The returned point carries a duality-gap
// certificate; construction fails loudly if the certificate is weak.
LassoSolution solve_lasso(const DenseMatrix& A, const Vec& b, double tau) {
  const long m = A.rows;
  const long d = A.cols;
  Vec colsq(static_cast<std::size_t>(d), 0.0);
  for (long j = 0; j < d; ++j) {
    double acc = 0.0;
    for (long i = 0; i < m; ++i) acc += A.at(i, j) * A.at(i, j);
    colsq[static_cast<std::size_t>(j)] = acc;
  }

  Vec x(static_cast<std::size_t>(d), 0.0);
  Vec r = b;  // r = b - A x throughout
  for (long sweep = 0; sweep < 100000; ++sweep) {
    double moved = 0.0;
    for (long j = 0; j < d; ++j) {
      double rho = colsq[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
      for (long i = 0; i < m; ++i) rho += A.at(i, j) * r[static_cast<std::size_t>(i)];
      const double mag = std::abs(rho) - tau;
      const double xn = mag > 0.0 ? std::copysign(mag, rho) / colsq[static_cast<std::size_t>(j)] : 0.0;
      const double dx = xn - x[static_cast<std::size_t>(j)];
      if (dx != 0.0) {
        for (long i = 0; i < m; ++i) r[static_cast<std::size_t>(i)] -= A.at(i, j) * dx;
        x[static_cast<std::size_t>(j)] = xn;
        moved = std::max(moved, std::abs(dx));
      }
    }
    if (moved <= 1e-15 * std::max(1.0, vecops::max_abs(x))) break;
  }

  // Polish: solve the reduced normal equations on the support, keeping the
  // coordinate-descent point if the polish flips a sign.
  std::vector<long> support;
  for (long j = 0; j < d; ++j) {
    if (x[static_cast<std::size_t>(j)] != 0.0) support.push_back(j);
  }
  if (!support.empty()) {
    const long s = static_cast<long>(support.size());
    DenseMatrix G(s, s);
    for (long a = 0; a < s; ++a) {
      for (long c = a; c < s; ++c) {
        double acc = 0.0;
        for (long i = 0; i < m; ++i) acc += A.at(i, support[static_cast<std::size_t>(a)]) * A.at(i, support[static_cast<std::size_t>(c)]);
        G.at(a, c) = acc;
        G.at(c, a) = acc;
      }
    }
    Vec rhs(static_cast<std::size_t>(s), 0.0);
    for (long a = 0; a < s; ++a) {
      const long j = support[static_cast<std::size_t>(a)];
      double acc = 0.0;
      for (long i = 0; i < m; ++i) acc += A.at(i, j) * b[static_cast<std::size_t>(i)];
      rhs[static_cast<std::size_t>(a)] = acc - tau * std::copysign(1.0, x[static_cast<std::size_t>(j)]);
    }
    DenseMatrix Gchol = G;
    cholesky_lower(Gchol);
    Vec xs = rhs;
    cholesky_solve(Gchol, xs);
    for (int refine = 0; refine < 2; ++refine) {
      Vec res(static_cast<std::size_t>(s), 0.0);
      for (long a = 0; a < s; ++a) {
        double acc = rhs[static_cast<std::size_t>(a)];
        for (long c = 0; c < s; ++c) acc -= G.at(a, c) * xs[static_cast<std::size_t>(c)];
        res[static_cast<std::size_t>(a)] = acc;
      }
      cholesky_solve(Gchol, res);
      for (long a = 0; a < s; ++a) xs[static_cast<std::size_t>(a)] += res[static_cast<std::size_t>(a)];
    }
    bool signs_ok = true;
    for (long a = 0; a < s; ++a) {
      if (std::copysign(1.0, xs[static_cast<std::size_t>(a)]) !=
          std::copysign(1.0, x[static_cast<std::size_t>(support[static_cast<std::size_t>(a)])])) {
        signs_ok = false;
        break;
      }
    }
    if (signs_ok) {
      for (long a = 0; a < s; ++a) x[static_cast<std::size_t>(support[static_cast<std::size_t>(a)])] = xs[static_cast<std::size_t>(a)];
    }
  }

  // Certificate: primal value against the scaled-residual dual point.
  Vec ax;
  matvec(A, x, ax);
  Vec res(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) res[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - ax[static_cast<std::size_t>(i)];
  CompensatedSum l1;
  for (long j = 0; j < d; ++j) l1.add(std::abs(x[static_cast<std::size_t>(j)]));
  const double primal = 0.5 * vecops::dot(res, res) + tau * l1.value();
  Vec atr;
  matvec_transposed(A, res, atr);
  const double ginf = vecops::max_abs(atr);
  const double scale = ginf > tau ? tau / ginf : 1.0;
  const double dual = -0.5 * scale * scale * vecops::dot(res, res) + scale * vecops::dot(res, b);
  const double gap = primal - dual;
  if (!(gap <= 1e-12 * std::max(1.0, primal))) {
    throw NumericError("lasso construction failed its optimality certificate, gap=" + fmt17(gap));
  }
  return {x, primal, std::max(gap, 0.0)};
}

// Damped Newton for the ridge-regularized logistic objective.
Vec solve_logistic(const LogisticRidgeObjective& f, double L) {
  Vec x(static_cast<std::size_t>(f.dim()), 0.0);
  Vec g, p, hp, res(x.size()), trial(x.size());
  for (int it = 0; it < 100; ++it) {
    f.gradient(x, g);
    if (vecops::norm(g) <= 1e-13 * std::max(1.0, L)) return x;
    const DenseMatrix H = f.hessian(x);
    DenseMatrix Hc = H;
    cholesky_lower(Hc);
    p = g;
    cholesky_solve(Hc, p);
    // One refinement pass counters the ridge-to-smoothness conditioning,
    // which otherwise leaves the solve floor above the gradient target.
    matvec(H, p, hp);
    for (std::size_t i = 0; i < p.size(); ++i) res[i] = g[i] - hp[i];
    cholesky_solve(Hc, res);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += res[i];
    const double fx = f.value(x);
    const double slope = vecops::dot(g, p);
    // Once the sufficient-decrease margin drops below a rounding of f, the
    // Armijo test degenerates to f(trial) <= fx and starts accepting bounce
    // micro-steps. slope >= ||g||^2 / L, so this regime only occurs deep in
    // the quadratic basin, where the unit Newton step contracts the gradient
    // on its own.
    const double measurable =
        32.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
    if (0.25 * slope <= measurable) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - p[i];
      if (trial == x) break;  // below the spacing of x: the float fixed point
    } else {
      double step = 1.0;
      while (true) {
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step * p[i];
        if (f.value(trial) <= fx - 0.25 * step * slope) break;
        step *= 0.5;
        if (step < 1e-12) {
          trial = x;  // no measurable descent along an exact Newton direction
          break;
        }
      }
      if (trial == x) break;
    }
    x = trial;
  }
  f.gradient(x, g);
  if (vecops::norm(g) <= 1e-12 * std::max(1.0, L)) return x;
  throw NumericError("logistic construction solve did not converge");
}

Vec unit_vector(long dim, long index) {
  Vec e(static_cast<std::size_t>(dim), 0.0);
  e[static_cast<std::size_t>(index)] = 1.0;
  return e;
}

// Consistency check run on every constructed or loaded instance: each exposed
// minimizer must actually be stationary, and its objective must match the
// declared optimal value.
void verify_minimizers(const CompositeProblem& p) {
  if (!p.optimal_value || p.known_minimizers.empty()) return;
  const double L = p.smooth->smoothness();
  const double lambda = 1.0 / L;
  Vec g, w, q;
  for (const Vec& z : p.known_minimizers) {
    const double fz = p.objective(z);
    if (!(std::abs(fz - *p.optimal_value) <= 1e-10 * std::max(1.0, std::abs(*p.optimal_value)))) {
      throw NumericError("minimizer value mismatch for " + p.name);
    }
    p.smooth->gradient(z, g);
    if (p.nonsmooth) {
      vecops::gradient_step(z, g, lambda, w);
      p.nonsmooth->prox(lambda, w, q);
      if (!(vecops::dist(q, z) <= kMinimizerGradTol * std::max(1.0, vecops::norm(z)))) {
        throw NumericError("minimizer is not a proximal fixed point for " + p.name);
      }
    } else if (!(vecops::norm(g) <= kMinimizerGradTol * std::max(1.0, L))) {
      throw NumericError("minimizer gradient is not small for " + p.name);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

double CompositeProblem::objective(const Vec& x) const {
  double v = smooth->value(x);
  if (nonsmooth) v += nonsmooth->value(x);
  return v;
}

double CompositeProblem::objective_gap(const Vec& x) const {
  if (gap_fn) return gap_fn(x);
  if (optimal_value) return objective(x) - *optimal_value;
  throw ConfigError("problem " + name + " does not expose an optimal value");
}

std::string CompositeProblem::id() const {
  if (!blueprint) return name;
  return name + ":dim=" + std::to_string(blueprint->dim) + ":seed=" + std::to_string(blueprint->seed);
}

double grad_check(const SmoothObjective& f, const Vec& x, double h) {
  Vec g;
  f.gradient(x, g);
  const double scale = std::max(1.0, vecops::norm(g));
  Vec probe = x;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f.value(probe);
    probe[i] = x[i] - h;
    const double fm = f.value(probe);
    probe[i] = x[i];
    worst = std::max(worst, std::abs((fp - fm) / (2.0 * h) - g[i]));
  }
  return worst / scale;
}

CompositeProblem problem_from_data(std::shared_ptr<const ProblemData> data) {
  if (!data) throw ConfigError("null problem description");
  CompositeProblem p;
  p.name = data->kind;
  p.blueprint = data;
  p.optimal_value = data->optimal_value;
  p.known_minimizers = data->minimizers;
  p.gap_curvature = data->gap_curvature;
  if (!data->minimizers.empty()) {
    MinimizerSet ms;
    ms.point = data->minimizers.front();
    ms.null_basis = data->null_basis;
    p.minimizer_set = ms;
  }

  if (data->kind == "quadratic-spd" || data->kind == "quadratic-degenerate") {
    p.smooth = std::make_shared<QuadraticObjective>(data);
    // Centered at the origin with optimal value zero, so the raw value is
    // already the gap and vanishes with ||x - argmin||^2: no cancellation.
    auto smooth = p.smooth;
    p.gap_fn = [smooth](const Vec& x) { return smooth->value(x); };
  } else if (data->kind == "least-squares") {
    p.smooth = std::make_shared<LeastSquaresObjective>(data);
    auto smooth = p.smooth;
    p.gap_fn = [smooth](const Vec& x) { return smooth->value(x); };
  } else if (data->kind == "huber") {
    p.smooth = std::make_shared<HuberObjective>(data);
    auto smooth = p.smooth;
    p.gap_fn = [smooth](const Vec& x) { return smooth->value(x); };
  } else if (data->kind == "logistic-l2") {
    p.smooth = std::make_shared<LogisticRidgeObjective>(data);
    auto smooth = p.smooth;
    const double fstar = data->optimal_value;
    p.gap_fn = [smooth, fstar](const Vec& x) { return smooth->value(x) - fstar; };
  } else if (data->kind == "lasso") {
    p.smooth = std::make_shared<LeastSquaresObjective>(data);
    p.nonsmooth = std::make_shared<L1Norm>(data->tau);
    // Expanding around the known minimizer keeps the gap accurate near it:
    //   F(x) - F* = 0.5 ||A (x - x*)||^2 + <x - x*, A^T(A x* - b)>
    //               + tau (||x||_1 - ||x*||_1)
    // evaluated term by term, with the l1 difference summed pairwise.
    const Vec& xstar = data->minimizers.front();
    Vec ax;
    matvec(data->matrix, xstar, ax);
    Vec rstar(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i) rstar[i] = ax[i] - data->rhs[i];
    Vec svec;
    matvec_transposed(data->matrix, rstar, svec);
    Vec abs_star(xstar.size());
    for (std::size_t i = 0; i < xstar.size(); ++i) abs_star[i] = std::abs(xstar[i]);
    const double tau = data->tau;
    p.gap_fn = [data, svec, abs_star, tau, xstar](const Vec& x) {
      Vec diff(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - xstar[i];
      Vec adiff;
      matvec(data->matrix, diff, adiff);
      CompensatedSum l1;
      for (std::size_t i = 0; i < x.size(); ++i) l1.add(std::abs(x[i]) - abs_star[i]);
      return 0.5 * vecops::dot(adiff, adiff) + vecops::dot(diff, svec) + tau * l1.value();
    };
  } else {
    throw ConfigError("unknown problem kind: " + data->kind);
  }

  verify_minimizers(p);
  return p;
}

CompositeProblem make_catalog_problem(const std::string& name, long dim, std::uint64_t seed) {
  if (dim < 1) throw ConfigError("problem dimension must be >= 1");
  auto data = std::make_shared<ProblemData>();
  data->kind = name;
  data->dim = dim;
  data->seed = seed;
  SeededRng rng(seed);

  if (name == "quadratic-spd") {
    if (dim == 1) {
      data->matrix = DenseMatrix(1, 1);
      data->matrix.at(0, 0) = 1.0;
      data->smoothness = 1.0;
      data->gap_curvature = 1.0;
    } else {
      // Draw order: eigenvalues, then basis entries.
      Vec eigs(static_cast<std::size_t>(dim));
      for (double& e : eigs) e = rng.uniform(1.0, 10.0);
      const DenseMatrix V = orthonormal_columns(dim, dim, rng);
      data->matrix = assemble_symmetric(eigs, V);
      data->smoothness = *std::max_element(eigs.begin(), eigs.end()) * kAssemblyCushion;
      data->gap_curvature = *std::min_element(eigs.begin(), eigs.end());
    }
    data->minimizers = {Vec(static_cast<std::size_t>(dim), 0.0)};
    data->optimal_value = 0.0;
  } else if (name == "quadratic-degenerate") {
    if (dim < 2) throw ConfigError("quadratic-degenerate needs dim >= 2");
    data->matrix = DenseMatrix(dim, dim);
    long null_index;
    if (dim == 2) {
      // The canonical flat parabola: f(x) = x_1^2 / 2, minimized on the
      // x_2 axis. Independent of the seed.
      data->matrix.at(0, 0) = 1.0;
      null_index = 1;
      data->smoothness = 1.0;
      data->gap_curvature = 1.0;
    } else {
      // Draw order: dim-1 eigenvalues, then the Fisher-Yates permutation
      // (index = next_u64() % (i+1)). Diagonal assembly is exact.
      Vec eigs(static_cast<std::size_t>(dim - 1));
      for (double& e : eigs) e = rng.uniform(0.5, 4.0);
      std::vector<long> perm(static_cast<std::size_t>(dim));
      std::iota(perm.begin(), perm.end(), 0L);
      for (long i = dim - 1; i >= 1; --i) {
        const long j = static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      }
      for (long i = 0; i < dim - 1; ++i) {
        data->matrix.at(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(i)]) =
            eigs[static_cast<std::size_t>(i)];
      }
      null_index = perm[static_cast<std::size_t>(dim - 1)];
      data->smoothness = *std::max_element(eigs.begin(), eigs.end());
      data->gap_curvature = *std::min_element(eigs.begin(), eigs.end());
    }
    data->null_basis = {unit_vector(dim, null_index)};
    data->minimizers = {Vec(static_cast<std::size_t>(dim), 0.0), unit_vector(dim, null_index)};
    data->optimal_value = 0.0;
  } else if (name == "least-squares" || name == "huber" || name == "lasso") {
    // Shared design: A = U diag(sigma) V^T with known singular values, so the
    // declared smoothness is the constructed top singular value squared.
    // Draw order: U entries, V entries, singular values, target vector.
    const long rows = 2 * dim;
    const DenseMatrix U = orthonormal_columns(rows, dim, rng);
    const DenseMatrix V = orthonormal_columns(dim, dim, rng);
    Vec sigma(static_cast<std::size_t>(dim));
    for (double& s : sigma) s = rng.uniform(1.0, 3.0);
    data->matrix = assemble_product(U, sigma, V);
    Vec target(static_cast<std::size_t>(dim));
    for (double& v : target) v = rng.symmetric();
    matvec(data->matrix, target, data->rhs);
    const double smax = *std::max_element(sigma.begin(), sigma.end());
    const double smin = *std::min_element(sigma.begin(), sigma.end());
    data->smoothness = smax * smax * kAssemblyCushion;
    data->gap_curvature = smin * smin;
    if (name == "lasso") {
      Vec atb;
      matvec_transposed(data->matrix, data->rhs, atb);
      data->tau = 0.35 * vecops::max_abs(atb);
      const LassoSolution sol = solve_lasso(data->matrix, data->rhs, data->tau);
      data->minimizers = {sol.x};
      data->optimal_value = sol.optimal_value;
    } else {
      // The right-hand side is the rounded image of the target, so the
      // residual at the target is a few ulps and the optimal value is zero
      // to far below every tolerance in use.
      data->minimizers = {target};
      data->optimal_value = 0.0;
      if (name == "huber") {
        data->delta = 1.0;
        data->gap_curvature.reset();  // only locally strongly convex
      }
    }
  } else if (name == "logistic-l2") {
    // Draw order: U entries, V entries, singular values, separating
    // direction, one flip draw per sample. The data scale keeps 1/L a few
    // thousandths so long-horizon energy checks sit well inside tolerance.
    const long rows = 8 * dim;
    const DenseMatrix U = orthonormal_columns(rows, dim, rng);
    const DenseMatrix V = orthonormal_columns(dim, dim, rng);
    const double sn = std::sqrt(static_cast<double>(rows));
    Vec sigma(static_cast<std::size_t>(dim));
    for (double& s : sigma) s = rng.uniform(20.0 * sn, 40.0 * sn);
    data->matrix = assemble_product(U, sigma, V);
    Vec w(static_cast<std::size_t>(dim));
    for (double& v : w) v = rng.symmetric();
    Vec margins;
    matvec(data->matrix, w, margins);
    data->rhs.resize(static_cast<std::size_t>(rows));
    for (long i = 0; i < rows; ++i) {
      double label = margins[static_cast<std::size_t>(i)] >= 0.0 ? 1.0 : -1.0;
      if (rng.uniform01() < 0.15) label = -label;
      data->rhs[static_cast<std::size_t>(i)] = label;
    }
    data->ridge = 1e-3;
    const double smax = *std::max_element(sigma.begin(), sigma.end());
    data->smoothness =
        smax * smax / (4.0 * static_cast<double>(rows)) * kAssemblyCushion + data->ridge;
    data->gap_curvature = data->ridge;
    LogisticRidgeObjective probe(std::make_shared<const ProblemData>(*data));
    const Vec xstar = solve_logistic(probe, data->smoothness);
    data->minimizers = {xstar};
    data->optimal_value = probe.value(xstar);
  } else {
    throw ConfigError(
        "unknown catalog problem '" + name +
        "' (expected quadratic-spd, quadratic-degenerate, least-squares, lasso, "
        "logistic-l2, huber)");
  }

  return problem_from_data(std::move(data));
}

// ---------------------------------------------------------------------------
// text round trip

namespace {

bool kind_has_rhs(const std::string& kind) {
  return kind != "quadratic-spd" && kind != "quadratic-degenerate";
}

void write_row(std::ostream& out, const Vec& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << fmt17(v[i]);
  }
  out << '\n';
}

Vec read_row(std::istream& in, long count, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(std::string("problem file ended early reading ") + what);
  std::istringstream ls(line);
  Vec v(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    if (!(ls >> v[static_cast<std::size_t>(i)])) {
      throw IoError(std::string("short row reading ") + what);
    }
  }
  double extra;
  if (ls >> extra) throw IoError(std::string("trailing values reading ") + what);
  return v;
}

}  // namespace

void dump_problem(const CompositeProblem& p, std::ostream& out) {
  if (!p.blueprint) throw ConfigError("problem has no serializable description");
  const ProblemData& d = *p.blueprint;
  out << "fistalab-problem v1"
      << " kind=" << d.kind << " dim=" << d.dim << " seed=" << d.seed
      << " rows=" << d.matrix.rows << " minimizers=" << d.minimizers.size()
      << " nullity=" << d.null_basis.size() << " L=" << fmt17(d.smoothness)
      << " fstar=" << fmt17(d.optimal_value)
      << " mu=" << (d.gap_curvature ? fmt17(*d.gap_curvature) : std::string("none"))
      << " tau=" << fmt17(d.tau) << " ridge=" << fmt17(d.ridge)
      << " delta=" << fmt17(d.delta) << '\n';
  for (long i = 0; i < d.matrix.rows; ++i) {
    for (long j = 0; j < d.matrix.cols; ++j) {
      if (j) out << ' ';
      out << fmt17(d.matrix.at(i, j));
    }
    out << '\n';
  }
  if (kind_has_rhs(d.kind)) write_row(out, d.rhs);
  for (const Vec& z : d.minimizers) write_row(out, z);
  for (const Vec& v : d.null_basis) write_row(out, v);
  if (!out) throw IoError("failed writing problem dump");
}

CompositeProblem load_problem(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw IoError("empty problem file");
  std::istringstream hs(header);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "fistalab-problem" || version != "v1") {
    throw IoError("not a fistalab problem file");
  }
  auto data = std::make_shared<ProblemData>();
  long rows = 0, n_min = 0, nullity = 0;
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw IoError("bad header token: " + tok);
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "kind") {
      data->kind = val;
    } else if (key == "dim") {
      data->dim = std::stol(val);
    } else if (key == "seed") {
      data->seed = std::stoull(val);
    } else if (key == "rows") {
      rows = std::stol(val);
    } else if (key == "minimizers") {
      n_min = std::stol(val);
    } else if (key == "nullity") {
      nullity = std::stol(val);
    } else if (key == "L") {
      data->smoothness = parse_double(val);
    } else if (key == "fstar") {
      data->optimal_value = parse_double(val);
    } else if (key == "mu") {
      if (val != "none") data->gap_curvature = parse_double(val);
    } else if (key == "tau") {
      data->tau = parse_double(val);
    } else if (key == "ridge") {
      data->ridge = parse_double(val);
    } else if (key == "delta") {
      data->delta = parse_double(val);
    } else {
      throw IoError("unknown header key: " + key);
    }
  }
  if (data->dim < 1 || rows < 1 || n_min < 1) throw IoError("bad problem header: " + header);
  data->matrix = DenseMatrix(rows, data->dim);
  for (long i = 0; i < rows; ++i) {
    const Vec row = read_row(in, data->dim, "matrix");
    for (long j = 0; j < data->dim; ++j) data->matrix.at(i, j) = row[static_cast<std::size_t>(j)];
  }
  if (kind_has_rhs(data->kind)) data->rhs = read_row(in, rows, "rhs");
  for (long i = 0; i < n_min; ++i) data->minimizers.push_back(read_row(in, data->dim, "minimizer"));
  for (long i = 0; i < nullity; ++i) data->null_basis.push_back(read_row(in, data->dim, "null basis"));
  return problem_from_data(std::move(data));
}

}  // namespace fistalab
