#pragma once

// Shared test oracles. The frozen constants were computed independently with
// 30-digit decimal arithmetic (mpmath) from the defining recurrences, then
// rounded once to double; tests compare against these literals rather than
// against the library's own output.

#include <cmath>
#include <vector>

#include "fistalab/problems.hpp"
#include "fistalab/vecops.hpp"

namespace oracle {

// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2 from t_1 = 1.
inline constexpr double kNesterovT2 = 1.61803398874989484820458683437;  // (1+sqrt5)/2
inline constexpr double kNesterovT3 = 2.19352708533105393856012350819;
inline constexpr double kNesterovT4 = 2.74979134012044521132128708737;

// alpha_k = (t_k - 1) / t_{k+1}.
inline constexpr double kNesterovAlpha2 = 0.281753525125320818187504012996;
inline constexpr double kNesterovAlpha3 = 0.43404278278030200061131566645;

// s_2 = t_2^2 at theta = 0, i.e. (3+sqrt5)/2.
inline constexpr double kNesterovS2 = 2.61803398874989484820458683437;

// For W_1 = 1/2, E_1 = 3/2, theta = 1/2:
//   C_z = sqrt(2 E_1) + theta sqrt(2 W_1) = sqrt3 + 1/2
//   velocity bound = sqrt(2 E_1) + C_z = 2 sqrt3 + 1/2
inline constexpr double kCzUnitSeeds = 2.23205080756887729352744634151;
inline constexpr double kVelBoundUnitSeeds = 3.96410161513775458705489268301;

// The general recurrence evaluated in 80-bit arithmetic, for cross-checking
// the double-precision sequence without trusting its own rounding.
inline std::vector<long double> tseq_long_double(double theta, long count) {
  std::vector<long double> t;
  t.reserve(static_cast<std::size_t>(count));
  t.push_back(1.0L);
  const long double om = 1.0L - static_cast<long double>(theta);
  for (long k = 1; k < count; ++k) {
    const long double tk = t.back();
    const long double th = static_cast<long double>(theta);
    t.push_back(0.5L * (om + std::sqrt(om * om + 4.0L * (tk * tk + th * tk))));
  }
  return t;
}

// Wraps a smooth objective and counts gradient evaluations.
class CountingSmooth : public fistalab::SmoothObjective {
 public:
  explicit CountingSmooth(std::shared_ptr<const fistalab::SmoothObjective> inner)
      : inner_(std::move(inner)) {}

  long dim() const override { return inner_->dim(); }
  double value(const fistalab::Vec& x) const override { return inner_->value(x); }
  void gradient(const fistalab::Vec& x, fistalab::Vec& g) const override {
    ++grad_calls_;
    inner_->gradient(x, g);
  }
  double smoothness() const override { return inner_->smoothness(); }

  long grad_calls() const { return grad_calls_; }

 private:
  std::shared_ptr<const fistalab::SmoothObjective> inner_;
  mutable long grad_calls_ = 0;
};

// Reference accelerated loop on raw arrays, written independently of the
// solver: same update order, no trace machinery. Returns x_K.
inline fistalab::Vec naive_accelerated(const fistalab::CompositeProblem& problem,
                                       const fistalab::Vec& x0, const fistalab::Vec& x1,
                                       const std::vector<double>& tseq, double lambda,
                                       long steps) {
  using fistalab::Vec;
  Vec x_prev = x0;
  Vec x = x1;
  Vec y(x.size()), g(x.size()), x_next(x.size());
  for (long k = 1; k <= steps; ++k) {
    const double t_k = tseq[static_cast<std::size_t>(k - 1)];
    const double t_next = tseq[static_cast<std::size_t>(k)];
    const double alpha = (t_k - 1.0) / t_next;
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + alpha * (x[i] - x_prev[i]);
    problem.smooth->gradient(y, g);
    for (std::size_t i = 0; i < x.size(); ++i) x_next[i] = y[i] - lambda * g[i];
    if (problem.nonsmooth) problem.nonsmooth->prox(lambda, x_next, x_next);
    x_prev = x;
    x = x_next;
  }
  return x;
}

}  // namespace oracle
