#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/quadrature.hpp"
#include "steinlab/special.hpp"

using namespace steinlab;

TEST_CASE("adaptive integration reproduces closed forms") {
  auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  r = integrate([](double x) { return std::exp(-x * x); }, -12.0, 12.0);
  CHECK(r.value == doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-13));
}

TEST_CASE("breakpoints handle kinks without losing digits") {
  auto r = integrate([](double x) { return std::fabs(x); }, -1.0, 2.0, {0.0});
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-13));
  // a narrow spike is still captured when bracketed beyond its visible width
  auto spike = [](double x) { return std::exp(-1e6 * x * x); };
  auto s = integrate(spike, -3.0, 7.0, {-5e-3, -1e-3, 1e-3, 5e-3});
  CHECK(s.value == doctest::Approx(std::sqrt(std::acos(-1.0)) / 1e3).epsilon(1e-10));
}

TEST_CASE("Gauss-Hermite moments of the standard normal") {
  CHECK(integrate_gaussian([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate_gaussian([](double x) { return x * x; }) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(integrate_gaussian([](double x) { return x * x * x * x; }) ==
        doctest::Approx(3.0).epsilon(1e-13));
  CHECK(integrate_gaussian([](double x) { return std::pow(x, 8); }) ==
        doctest::Approx(105.0).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre weights sum to the interval length") {
  std::vector<double> x, w;
  gauss_legendre(7, x, w);
  double s = 0.0, sx2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += w[i];
    sx2 += w[i] * x[i] * x[i];
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sx2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("root finding and quantile inversion") {
  double root = brent_root([](double x) { return std::cos(x); }, 0.0, 2.0);
  CHECK(root == doctest::Approx(std::acos(-1.0) / 2.0).epsilon(1e-13));

  double q = quantile_from_cdf([](double x) { return normal_cdf(x); }, 0.975, -1.0,
                               1.0, -40.0, 40.0);
  CHECK(q == doctest::Approx(1.959963984540054).epsilon(1e-10));
}

TEST_CASE("normal and gamma special functions agree with references") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-13));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  // P(1, x) = 1 - e^{-x}
  CHECK(reg_lower_gamma(1.0, 0.7) == doctest::Approx(1.0 - std::exp(-0.7)).epsilon(1e-13));
  CHECK(reg_upper_gamma(1.0, 0.7) == doctest::Approx(std::exp(-0.7)).epsilon(1e-13));
  CHECK(inv_reg_lower_gamma(1.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}
