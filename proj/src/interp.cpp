#include "steinlab/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace steinlab {

CubicHermite::CubicHermite(std::vector<double> xs, std::vector<double> ys,
                           std::vector<double> ds)
    : x(std::move(xs)), y(std::move(ys)), d(std::move(ds)) {
  if (x.size() != y.size() || x.size() != d.size() || x.size() < 2)
    throw std::invalid_argument("CubicHermite: inconsistent sizes");
}

double CubicHermite::operator()(double t) const {
  const std::size_t n = x.size();
  if (t <= x.front()) return y.front() + d.front() * (t - x.front());
  if (t >= x.back()) return y.back() + d.back() * (t - x.back());
  std::size_t hi = std::upper_bound(x.begin(), x.end(), t) - x.begin();
  std::size_t lo = hi - 1;
  if (hi >= n) { hi = n - 1; lo = n - 2; }
  const double h = x[hi] - x[lo];
  const double s = (t - x[lo]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y[lo] + h10 * h * d[lo] + h01 * y[hi] + h11 * h * d[hi];
}

double CubicHermite::prime(double t) const {
  const std::size_t n = x.size();
  if (t <= x.front()) return d.front();
  if (t >= x.back()) return d.back();
  std::size_t hi = std::upper_bound(x.begin(), x.end(), t) - x.begin();
  std::size_t lo = hi - 1;
  if (hi >= n) { hi = n - 1; lo = n - 2; }
  const double h = x[hi] - x[lo];
  const double s = (t - x[lo]) / h;
  const double s2 = s * s;
  const double g00 = (6.0 * s2 - 6.0 * s) / h;
  const double g10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double g01 = (-6.0 * s2 + 6.0 * s) / h;
  const double g11 = 3.0 * s2 - 2.0 * s;
  return g00 * y[lo] + g10 * d[lo] + g01 * y[hi] + g11 * d[hi];
}

CubicHermite pchip(std::vector<double> xs, std::vector<double> ys) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("pchip: need at least 2 points");
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = xs[i + 1] - xs[i];
    delta[i] = (ys[i + 1] - ys[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d[i] = 0.0;
      } else {
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (s * d0 <= 0.0) s = 0.0;
      else if (d0 * d1 <= 0.0 && std::fabs(s) > 3.0 * std::fabs(d0)) s = 3.0 * d0;
      return s;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }
  return CubicHermite(std::move(xs), std::move(ys), std::move(d));
}

}  // namespace steinlab
