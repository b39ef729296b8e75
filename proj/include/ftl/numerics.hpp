#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace ftl {

// Neumaier-compensated accumulator. Exact-style summation keeps the mass and
// quantile bookkeeping well below the 1e-12 relative tolerances used by the
// invariant checks.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// 5-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 9.
inline constexpr std::array<double, 5> kGauss5Nodes = {
    -0.9061798459386640, -0.5384693101056831, 0.0,
    0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGauss5Weights = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
    0.4786286704993665, 0.2369268850561891};

// Integral of |d| over [z0, z1] for the linear function through (z0, d0) and
// (z1, d1); splits at the interior sign change when there is one.
inline double abs_linear_integral(double z0, double z1, double d0, double d1) {
  const double width = z1 - z0;
  if (width <= 0.0) return 0.0;
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0))
    return 0.5 * std::abs(d0 + d1) * width;
  const double cross = width * d0 / (d0 - d1);
  return 0.5 * (std::abs(d0) * cross + std::abs(d1) * (width - cross));
}

template <typename F>
double gauss5(double a, double b, F&& f) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t q = 0; q < 5; ++q) {
    acc += kGauss5Weights[q] * f(mid + half * kGauss5Nodes[q]);
  }
  return acc * half;
}

}  // namespace ftl
