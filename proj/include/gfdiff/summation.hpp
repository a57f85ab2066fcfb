#pragma once

#include <cmath>

namespace gfdiff {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
  constexpr CompensatedSum() = default;
  explicit constexpr CompensatedSum(double initial) : sum_(initial) {}

  void add(double value) {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) {
    add(value);
    return *this;
  }

  [[nodiscard]] double value() const { return sum_ + compensation_; }

private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace gfdiff
