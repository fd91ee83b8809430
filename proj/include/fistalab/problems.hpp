#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fistalab/vecops.hpp"

namespace fistalab {

// Row-major dense matrix, sized once at construction.
struct DenseMatrix {
  long rows = 0;
  long cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(long r, long c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

  double& at(long i, long j) { return data[static_cast<std::size_t>(i * cols + j)]; }
  double at(long i, long j) const { return data[static_cast<std::size_t>(i * cols + j)]; }
};

// out = A x and out = A^T x, accumulated strictly in index order.
void matvec(const DenseMatrix& A, const Vec& x, Vec& out);
void matvec_transposed(const DenseMatrix& A, const Vec& x, Vec& out);

// Differentiable term f with an L-Lipschitz gradient.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual long dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual void gradient(const Vec& x, Vec& g) const = 0;
  // Declared Lipschitz constant of the gradient; always > 0.
  virtual double smoothness() const = 0;
};

// Convex term g with an exact proximal map. value may return +infinity.
class ProxFriendly {
 public:
  virtual ~ProxFriendly() = default;
  virtual double value(const Vec& x) const = 0;
  // out = argmin_u { g(u) + ||u - y||^2 / (2 lambda) }; out may alias y.
  virtual void prox(double lambda, const Vec& y, Vec& out) const = 0;
};

// Componentwise shrinkage: out_i = sign(y_i) * max(|y_i| - tau, 0).
void soft_threshold(const Vec& y, double tau, Vec& out);

class L1Norm : public ProxFriendly {
 public:
  explicit L1Norm(double tau);
  double value(const Vec& x) const override;
  void prox(double lambda, const Vec& y, Vec& out) const override;
  double weight() const { return tau_; }

 private:
  double tau_;
};

class BoxIndicator : public ProxFriendly {
 public:
  BoxIndicator(double lo, double hi);
  double value(const Vec& x) const override;
  void prox(double lambda, const Vec& y, Vec& out) const override;

 private:
  double lo_, hi_;
};

// Affine description of the full solution set: point + orthonormal directions
// along which the objective is flat. Empty basis means the minimizer is unique.
struct MinimizerSet {
  Vec point;
  std::vector<Vec> null_basis;
};

// Serializable description of a generated instance. Everything needed to
// rebuild the objective bit-for-bit lives here; problem_from_data is the
// single construction path shared by the catalog and the file loader.
struct ProblemData {
  std::string kind;
  long dim = 0;
  std::uint64_t seed = 0;
  DenseMatrix matrix;                // Q (dim x dim) or A/X (rows x dim)
  Vec rhs;                           // b, or +-1 labels; empty for quadratics
  std::vector<Vec> minimizers;       // at least one
  std::vector<Vec> null_basis;      // flat directions (quadratic-degenerate)
  double smoothness = 0.0;
  double optimal_value = 0.0;
  std::optional<double> gap_curvature;  // mu with F(x) - F* >= mu/2 * dist^2
  double tau = 0.0;                  // lasso
  double ridge = 0.0;                // logistic-l2
  double delta = 0.0;                // huber
};

struct CompositeProblem {
  std::string name;
  std::shared_ptr<const SmoothObjective> smooth;
  std::shared_ptr<const ProxFriendly> nonsmooth;  // null for smooth-only problems
  std::optional<double> optimal_value;
  std::vector<Vec> known_minimizers;
  std::optional<MinimizerSet> minimizer_set;
  std::optional<double> gap_curvature;
  // Cancellation-free F(x) - F*. Empty when no optimal value is known.
  std::function<double(const Vec&)> gap_fn;
  std::shared_ptr<const ProblemData> blueprint;  // set for catalog and loaded instances

  long dim() const { return smooth ? smooth->dim() : 0; }
  bool is_composite() const { return nonsmooth != nullptr; }
  double objective(const Vec& x) const;
  bool has_gap() const { return static_cast<bool>(gap_fn) || optimal_value.has_value(); }
  double objective_gap(const Vec& x) const;
  std::string id() const;
};

// Max over coordinates of |central difference - gradient_i| / max(1, ||gradient||).
double grad_check(const SmoothObjective& f, const Vec& x, double h);

// Deterministic instances, pure functions of (name, dim, seed). Names:
// quadratic-spd, quadratic-degenerate, least-squares, lasso, logistic-l2, huber.
CompositeProblem make_catalog_problem(const std::string& name, long dim,
                                      std::uint64_t seed);

CompositeProblem problem_from_data(std::shared_ptr<const ProblemData> data);

// Text round trip: one header line, then rows of decimal floats. Loading a
// dump reproduces the instance bit-for-bit.
void dump_problem(const CompositeProblem& p, std::ostream& out);
CompositeProblem load_problem(std::istream& in);

}  // namespace fistalab
