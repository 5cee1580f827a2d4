#pragma once

#include <vector>

namespace steinlab {

// Piecewise-cubic Hermite interpolant with caller-supplied slopes.
// Reproduces any function whose values and first derivatives are sampled
// exactly (in particular linear and quadratic data with exact slopes).
// Outside [x.front(), x.back()] it extrapolates linearly with the end slope.
struct CubicHermite {
  std::vector<double> x, y, d;

  CubicHermite() = default;
  CubicHermite(std::vector<double> xs, std::vector<double> ys, std::vector<double> ds);

  double operator()(double t) const;
  double prime(double t) const;  // derivative (constant end slope outside)
  bool empty() const { return x.empty(); }
};

// Monotone piecewise-cubic interpolant (Fritsch-Carlson slope limiting).
// Used for CDF tables where monotonicity must be preserved.
CubicHermite pchip(std::vector<double> xs, std::vector<double> ys);

}  // namespace steinlab
