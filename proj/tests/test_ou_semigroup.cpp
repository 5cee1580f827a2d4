#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/functionals.hpp"
#include "steinlab/measures.hpp"
#include "steinlab/numeric.hpp"
#include "steinlab/ou_semigroup.hpp"
#include "steinlab/quadrature.hpp"

using namespace steinlab;

#define CHECK_NEAR(a, b, tol)                                                  \
  do {                                                                         \
    const double va = (a), vb = (b);                                           \
    INFO(#a " = ", va, ", " #b " = ", vb);                                     \
    CHECK(std::fabs(va - vb) <= (tol));                                        \
  } while (0)

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("interpolation average of a quadratic is exact") {
  CHECK_NEAR(mehler_apply([](double y) { return y * y; }, 0.7, 1.3, 0),
             std::exp(-1.4) * 1.69 + (1.0 - std::exp(-1.4)), 1e-12);
}

TEST_CASE("evolved scaled gaussian stays gaussian with the interpolated variance") {
  Target t = target_gaussian_scale(2.0);
  const double tt = 0.5;
  Evolved ev(t, tt);
  const double E2 = std::exp(-2.0 * tt);
  const double st2 = 1.0 + E2;  // evolved variance
  const double x = 1.0;
  const double rho = std::exp(-x * x / (2.0 * st2)) / std::sqrt(2.0 * kPi * st2);
  CHECK_NEAR(ev.density(x), rho, 1e-12);
  const double phi = std::exp(-0.5) / std::sqrt(2.0 * kPi);
  CHECK_NEAR(ev.h(x), rho / phi, 1e-10);
  CHECK_NEAR(ev.h_prime(x), rho / phi * x * (1.0 - 1.0 / st2), 1e-10);
  CHECK_NEAR(ev.tau(0.4), st2, 1e-10);
  CHECK_NEAR(ev.entropy().value, 0.5 * (st2 - 1.0 - std::log(st2)), 2e-8);
  CHECK_NEAR(ev.fisher().value, sqr(st2 - 1.0) / st2, 5e-7);
  CHECK_NEAR(sqr(ev.discrepancy().value), E2 * E2, 2e-7);
  Target tg = ev.as_target();
  CHECK_NEAR(tg.density(0.3), std::exp(-0.09 / (2.0 * st2)) / std::sqrt(2.0 * kPi * st2),
             1e-9);
}

TEST_CASE("decay rows on the gaussian family hit the closed forms") {
  Target t = target_gaussian_scale(2.0);
  auto rows = decay_curves(t, {0.25, 1.0});
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    const double st2 = 1.0 + std::exp(-2.0 * r.t);
    CHECK_NEAR(r.I, sqr(st2 - 1.0) / st2, 1e-6);
    CHECK_NEAR(r.bound_I_improved, sqr(st2 - 1.0) / st2, 1e-9);
    CHECK_NEAR(r.S, std::exp(-2.0 * r.t), 1e-6);
    CHECK_NEAR(r.H, 0.5 * (st2 - 1.0 - std::log(st2)), 1e-7);
  }
}

TEST_CASE("entropy equals the integrated information flow: analytic variance case") {
  auto r = de_bruijn_check(target_gaussian_scale(2.0));
  INFO("H = ", r.H, ", integral = ", r.integral, ", residual = ", r.residual);
  CHECK(std::fabs(r.residual) <= 1e-4);
  CHECK_NEAR(r.H, 0.5 * (1.0 - std::log(2.0)), 1e-7);
}

TEST_CASE("evolved mixture density is the exact two-gaussian convolution") {
  Target t = target_mixture(10.0, 0.1);
  Evolved ev(t, 1e-4);
  const double E2 = std::exp(-2e-4), s2 = 1.0 - E2;
  const double v1 = E2 + s2, v2 = 0.01 * E2 + s2;
  const double x = 0.05, c = 1.0 / std::sqrt(2.0 * kPi);
  const double exact = 0.9 * c / std::sqrt(v1) * std::exp(-x * x / (2 * v1)) +
                       0.1 * c / std::sqrt(v2) * std::exp(-x * x / (2 * v2));
  CHECK_NEAR(ev.density(x), exact, 1e-9);

  auto f = ev.fisher();
  auto rho = [&](double y) {
    return 0.9 * c / std::sqrt(v1) * std::exp(-y * y / (2 * v1)) +
           0.1 * c / std::sqrt(v2) * std::exp(-y * y / (2 * v2));
  };
  auto drho = [&](double y) {
    return 0.9 * c / std::sqrt(v1) * std::exp(-y * y / (2 * v1)) * (-y / v1) +
           0.1 * c / std::sqrt(v2) * std::exp(-y * y / (2 * v2)) * (-y / v2);
  };
  auto integ = [&](double y) {
    const double rr = rho(y);
    const double u = drho(y) / rr + y;
    return u * u * rr;
  };
  const double exact_I =
      integrate(integ, -12.0, 12.0, {-0.5, -0.1, 0.1, 0.5}, default_quad_options()).value;
  CHECK_NEAR(f.value, exact_I, 5e-4 * exact_I);
}

TEST_CASE("mixture decay rows respect every bound") {
  Target t = target_mixture(10.0, 0.1);
  auto rows = decay_curves(t, {0.25, 1.0});
  for (const auto& r : rows) {
    CHECK(r.I <= r.bound_I_lsi * (1 + 1e-6));
    CHECK(r.I <= r.bound_I_improved * (1 + 1e-6));
    CHECK(r.S <= std::exp(-2.0 * r.t) * std::sqrt(0.041145) * (1 + 1e-4));
    CHECK(r.H <= r.bound_H_exp * (1 + 1e-6));
  }
}

TEST_CASE("entropy equals the integrated information flow: mixture and gamma") {
  auto m = de_bruijn_check(target_mixture(10.0, 0.1));
  INFO("mixture residual = ", m.residual);
  CHECK(std::fabs(m.residual) <= 1e-3);
  auto g = de_bruijn_check(target_centered_gamma(3.0));
  INFO("gamma residual = ", g.residual);
  CHECK(std::fabs(g.residual) <= 1e-3);
}

TEST_CASE("evolved gamma information is finite for positive times") {
  Target t = target_centered_gamma(3.0);
  for (double tt : {1e-3, 1e-2, 0.1}) {
    Evolved ev(t, tt);
    auto f = ev.fisher();
    INFO("t = ", tt, ", I = ", f.value);
    CHECK(!f.diverged);
    CHECK(std::isfinite(f.value));
  }
}

TEST_CASE("sampled score matches the analytic conditional-mean form") {
  Target t = target_gaussian_scale(2.0);
  auto est = score_mc(t, 0.5, 1.0, 400000, 12345);
  const double st2 = 1.0 + std::exp(-1.0);
  const double exact = (st2 - 1.0) / st2;
  // finite-sample smoothing gives a small known bias at this resolution
  CHECK_NEAR(est.value, exact - 0.00269, 3.0 * est.se + 1e-4);
  CHECK(std::fabs(est.value - exact) < 0.02);
}

TEST_CASE("evolved uniform keeps unit mass and finite information") {
  Target u = target_uniform();
  Evolved ev(u, 0.05);
  CHECK_NEAR(target_moment(ev.as_target(), 0), 1.0, 1e-7);
  auto f = ev.fisher();
  CHECK(!f.diverged);
  CHECK(std::isfinite(f.value));
}
