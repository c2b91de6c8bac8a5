#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace gsa {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(e^a + e^b), safe for -inf operands.
inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a) && a < 0) return kNegInf;
  const double d = b - a;
  if (d < -745.0) return a;
  return a + std::log1p(std::exp(d));
}

// log(e^a - e^b), requires a >= b up to rounding noise; underflow gives -inf.
inline double log_sub_exp(double a, double b) {
  if (std::isinf(b) && b < 0) return a;
  const double d = b - a;
  if (d >= 0.0) return kNegInf;
  const double rem = -std::expm1(d);
  if (rem <= 0.0) return kNegInf;
  return a + std::log(rem);
}

inline double log_sum_exp(std::span<const double> xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (std::isinf(mx) && mx < 0) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace gsa
