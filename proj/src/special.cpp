#include "steinlab/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace steinlab {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

namespace {

// Rational initial approximation (relative error ~1e-9 across the domain),
// refined below to machine precision.
double quantile_seed(double u) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (u < plow) {
    double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - u));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = u - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    if (u == 0.0) return -std::numeric_limits<double>::infinity();
    if (u == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("normal_quantile: u outside (0,1)");
  }
  double x = quantile_seed(u);
  for (int it = 0; it < 3; ++it) {  // Halley refinement
    double e = normal_cdf(x) - u;
    double p = normal_pdf(x);
    if (p <= 0.0) break;
    double un = e / p;
    x -= un / (1.0 + 0.5 * un * x);
  }
  return x;
}

namespace {

double lower_gamma_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 1; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double upper_gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double reg_lower_gamma(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("reg_lower_gamma: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return lower_gamma_series(a, x);
  return 1.0 - upper_gamma_cf(a, x);
}

double reg_upper_gamma(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("reg_upper_gamma: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - lower_gamma_series(a, x);
  return upper_gamma_cf(a, x);
}

double inv_reg_lower_gamma(double a, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("inv_reg_lower_gamma: u outside [0,1)");
  if (u == 0.0) return 0.0;
  // Wilson-Hilferty seed, then safeguarded Newton.
  double g = normal_quantile(u);
  double t = 1.0 - 1.0 / (9.0 * a) + g / (3.0 * std::sqrt(a));
  double x = a * t * t * t;
  if (!(x > 0.0)) x = a * std::exp((std::log(u) + std::lgamma(a + 1.0)) / a);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    double f = reg_lower_gamma(a, x) - u;
    if (f > 0.0) hi = x; else lo = x;
    double pdf = std::exp(-x + (a - 1.0) * std::log(x) - std::lgamma(a));
    double step = (pdf > 0.0) ? f / pdf : 0.0;
    double xn = x - step;
    if (!(xn > lo && (xn < hi))) xn = std::isinf(hi) ? x * 2.0 : 0.5 * (lo + hi);
    if (std::fabs(xn - x) < 1e-14 * (1.0 + std::fabs(x))) { x = xn; break; }
    x = xn;
  }
  return x;
}

}  // namespace steinlab
