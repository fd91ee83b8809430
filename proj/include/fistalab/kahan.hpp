#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fistalab {

// Neumaier-compensated scalar accumulator. The running compensation term
// captures the low-order bits lost by each += so that sums of 1e5+ terms stay
// accurate to a few ulps of the true value instead of drifting by O(n) ulps.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Componentwise compensated accumulator for weighted vector sums.
class CompensatedVec {
 public:
  explicit CompensatedVec(std::size_t n) : cells_(n) {}

  // acc += w * v
  void add_scaled(double w, const std::vector<double>& v) {
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i].add(w * v[i]);
  }

  std::vector<double> value() const {
    std::vector<double> out(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) out[i] = cells_[i].value();
    return out;
  }

  std::size_t size() const { return cells_.size(); }

 private:
  std::vector<CompensatedSum> cells_;
};

}  // namespace fistalab
