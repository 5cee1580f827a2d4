#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/gamma_calculus.hpp"
#include "steinlab/rng.hpp"

using namespace steinlab;

namespace {
RatPoly rand_int_poly(Rng& r, int deg) {
  std::vector<Rat> c;
  for (int k = 0; k <= deg; ++k) c.emplace_back(static_cast<int>(r.uniform() * 11) - 5);
  return RatPoly(std::move(c));
}
}  // namespace

TEST_CASE("iterated forms for the quadratic under the ornstein-uhlenbeck model") {
  Diffusion1D ou = model_ou();
  RatPoly f = RatPoly::monomial(2);
  CHECK(iterated_gamma(ou, 1, f) == RatPoly::monomial(2, Rat(4)));
  CHECK(iterated_gamma(ou, 2, f) == RatPoly({Rat(4), Rat(0), Rat(4)}));
  CHECK(iterated_gamma(ou, 3, f) == RatPoly({Rat(12), Rat(0), Rat(4)}));
}

TEST_CASE("closed forms and bilinearity on random integer polynomials") {
  Diffusion1D ou = model_ou();
  Rng r(11);
  for (int i = 0; i < 24; ++i) {
    RatPoly p = rand_int_poly(r, 6), q = rand_int_poly(r, 5);
    RatPoly g1 = iterated_gamma(ou, 1, p);
    RatPoly g2 = iterated_gamma(ou, 2, p);
    RatPoly g3 = iterated_gamma(ou, 3, p);
    RatPoly d2 = p.derivative().derivative();
    RatPoly d3 = d2.derivative();
    CHECK(g2 == d2 * d2 + g1);
    CHECK(g3 == d3 * d3 + Rat(3) * g2 - Rat(2) * g1);
    for (int n = 1; n <= 3; ++n) {
      RatPoly lhs = iterated_gamma(ou, n, p + q) + iterated_gamma(ou, n, p - q);
      RatPoly rhs = Rat(2) * iterated_gamma(ou, n, p) + Rat(2) * iterated_gamma(ou, n, q);
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("laguerre second form of the coordinate") {
  Diffusion1D lag = model_laguerre(Rat(3, 2));
  CHECK(iterated_gamma(lag, 2, RatPoly::monomial(1)) == RatPoly({Rat(3, 4), Rat(1, 2)}));
}

TEST_CASE("jacobi model: exact second and third forms, factorization identity") {
  Diffusion1D jac = model_jacobi();
  RatPoly x = RatPoly::monomial(1);
  CHECK(iterated_gamma(jac, 2, x) == RatPoly({Rat(1), Rat(0), Rat(1)}));
  CHECK(iterated_gamma(jac, 3, x) == RatPoly({Rat(3), Rat(0), Rat(-1)}));

  Rng r(13);
  RatPoly a = jac.a;
  for (int i = 0; i < 24; ++i) {
    RatPoly p = rand_int_poly(r, 6);
    RatPoly p1 = p.derivative(), p2 = p1.derivative(), p3 = p2.derivative();
    RatPoly t = x * p1 - a * p2;
    CHECK(iterated_gamma(jac, 2, p) == p1 * p1 + t * t);
    RatPoly inner = a * p3 - Rat(3) * (x * p2) - p1;
    RatPoly u = p1 + x * p2;
    RatPoly rhs = a * (inner * inner + u * u + Rat(2) * (p2 * p2));
    CHECK(iterated_gamma(jac, 3, p) - iterated_gamma(jac, 2, p) == rhs);
  }
}

TEST_CASE("curvature criteria pass on the model constants") {
  CriteriaReport r1 = check_criteria(model_ou(), 1.0, 1.0, 1.0, 1000, 4);
  INFO("ou slacks: ", r1.c1.min_slack, " ", r1.c2.min_slack, " ", r1.c3.min_slack);
  CHECK(r1.pass);

  CriteriaReport r2 = check_criteria(model_laguerre(Rat(3, 2)), 0.5, 0.5, 0.5, 1000, 4);
  INFO("laguerre slacks: ", r2.c1.min_slack, " ", r2.c2.min_slack, " ", r2.c3.min_slack);
  CHECK(r2.pass);

  CriteriaReport r3 = check_criteria(model_jacobi(), 1.0, 1.0, 0.5, 1000, 4);
  INFO("jacobi slacks: ", r3.c1.min_slack, " ", r3.c2.min_slack, " ", r3.c3.min_slack);
  CHECK(r3.pass);

  CriteriaReport r4 = check_criteria(model_laguerre(Rat(3)), 0.5, 0.5, 0.5, 1000, 4);
  CHECK(r4.pass);
}

TEST_CASE("pointwise conditions for log-concave potentials") {
  RatPoly half_x2({Rat(0), Rat(0), Rat(1, 2)});
  LogConcaveReport a = log_concave_conditions(half_x2, 1.0 / 3.0);
  CHECK(a.pass);
  CHECK(std::fabs(a.min_slack_a) <= 1e-12);  // tight at the quadratic potential

  RatPoly quart({Rat(0), Rat(0), Rat(1, 2), Rat(0), Rat(1, 12)});
  LogConcaveReport b = log_concave_conditions(quart, 0.25);
  INFO("quartic slacks: ", b.min_slack_convexity, " ", b.min_slack_a, " ",
       b.min_slack_b, " at x = ", b.worst_x_b);
  CHECK(b.pass);
  CHECK(std::fabs(b.min_slack_b - 1.6584) <= 0.02);
  CHECK(std::fabs(std::fabs(b.worst_x_b) - 0.78) <= 0.05);

  LogConcaveReport c = log_concave_conditions(half_x2, 2.0);
  CHECK(!c.pass);
  CHECK(std::fabs(c.min_slack_convexity - (-1.0)) <= 1e-12);
}
