#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fistalab {

using Vec = std::vector<double>;

// Dense vector kernels. Every loop accumulates strictly in index order, so the
// results depend only on IEEE-754 double arithmetic and never on a vendor BLAS
// or on compiler-chosen reassociation. Runs are therefore reproducible
// bit-for-bit across platforms.
namespace vecops {

inline double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// ||a - b|| without materializing the difference.
inline double dist(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline void sub(const Vec& a, const Vec& b, Vec& out) {
  out.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
}

// y = x + alpha * (x - x_prev), the momentum extrapolation.
inline void extrapolate(const Vec& x, const Vec& x_prev, double alpha, Vec& y) {
  y.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + alpha * (x[i] - x_prev[i]);
}

// out = y - lambda * g, the forward (gradient) half-step.
inline void gradient_step(const Vec& y, const Vec& g, double lambda, Vec& out) {
  out.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] - lambda * g[i];
}

inline bool all_finite(const Vec& a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline double max_abs(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace vecops
}  // namespace fistalab
