#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "steinlab/gauss_functionals.hpp"
#include "steinlab/inequalities.hpp"
#include "steinlab/mpoly.hpp"

using namespace steinlab;

#define CHECK_NEAR(a, b, tol)                                                  \
  do {                                                                         \
    const double va = (a), vb = (b);                                           \
    INFO(#a " = ", va, ", " #b " = ", vb);                                     \
    CHECK(std::fabs(va - vb) <= (tol));                                        \
  } while (0)

namespace {
// F = sum of npairs products x_{2i+1} x_{2i+2}: a second-chaos eigenfunction.
MPoly pairs_poly(int npairs) {
  const int dim = 2 * npairs;
  MPoly F(dim);
  for (int i = 0; i < npairs; ++i) {
    MPoly::Mono m(static_cast<std::size_t>(dim), 0);
    m[static_cast<std::size_t>(2 * i)] = 1;
    m[static_cast<std::size_t>(2 * i + 1)] = 1;
    F.add_term(m, 1.0);
  }
  return F;
}
}  // namespace

TEST_CASE("polynomial parser, algebra and gaussian moments") {
  MPoly p = parse_mpoly("3*x1^2*x4 - 1.5*x2 + 2", 4);
  CHECK_NEAR(p.eval({1, 2, 3, 4}), 11.0, 1e-12);
  CHECK_NEAR(p.d(0).eval({1, 2, 3, 4}), 24.0, 1e-12);
  CHECK_NEAR(gaussian_expectation(p), 2.0, 1e-12);
  CHECK_NEAR(gaussian_expectation(parse_mpoly(" x1 ^ 2 * x2 ^ 4 ", 2)), 3.0, 1e-12);
  CHECK_NEAR(gaussian_expectation(parse_mpoly("x1^8", 1)), 105.0, 1e-12);
  MPoly r = parse_mpoly(p.str(), 4);  // printing round-trips through the parser
  CHECK_NEAR(r.eval({0.3, -1.2, 0.7, 2.5}), p.eval({0.3, -1.2, 0.7, 2.5}), 1e-12);
  CHECK(p.total_degree() == 3);
  CHECK_THROWS(parse_mpoly("2x1", 2));
  CHECK_THROWS(parse_mpoly("x5", 4));
  CHECK_THROWS(parse_mpoly("x1^", 2));
  CHECK_THROWS(parse_mpoly("", 2));
  CHECK_THROWS(parse_mpoly("x1 + * x2", 2));
}

TEST_CASE("generator, squared field and eigenfunction detection") {
  MPoly x1 = MPoly::variable(1, 0);
  CHECK((ou_apply(x1) + x1).is_zero(0.0));

  MPoly F = pairs_poly(2);
  CHECK((ou_apply(F) + 2.0 * F).is_zero(0.0));
  MPoly G = carre_du_champ(F, F);
  MPoly R2(4);
  for (int i = 0; i < 4; ++i) R2 = R2 + MPoly::variable(4, i) * MPoly::variable(4, i);
  CHECK((G - R2).is_zero(0.0));

  MPoly x1sq = parse_mpoly("x1^2", 1);
  CHECK_NEAR(ou_apply(x1sq).eval({1.5}), 2.0 - 2.0 * 2.25, 1e-12);

  CHECK(carre_du_champ(MPoly::variable(2, 0), MPoly::variable(2, 1)).is_zero(0.0));
  MPoly H2 = parse_mpoly("0.7071067811865476*x1^2 - 0.7071067811865476", 1);
  CHECK_NEAR(carre_du_champ(H2, H2).eval({1.3}), 2.0 * 1.69, 1e-12);

  CHECK((eigen_check(x1) && std::fabs(*eigen_check(x1) - 1.0) < 1e-12));
  CHECK((eigen_check(F) && std::fabs(*eigen_check(F) - 2.0) < 1e-12));
  CHECK(!eigen_check(x1sq));
  CHECK((eigen_check(H2) && std::fabs(*eigen_check(H2) - 2.0) < 1e-12));
}

TEST_CASE("eigenfunction variance bound via exact moments") {
  MPoly x1 = MPoly::variable(1, 0);
  MCEstimate v0 = eigen_stein_bound({x1}, {1.0});
  CHECK_NEAR(v0.value, 0.0, 1e-14);
  CHECK(v0.samples == 0);
  CHECK(v0.note == "exact moments");

  MPoly H2 = parse_mpoly("0.7071067811865476*x1^2 - 0.7071067811865476", 1);
  CHECK_NEAR(eigen_stein_bound({H2}, {2.0}).value, 2.0, 1e-9);
  CHECK_NEAR(eigen_stein_bound({parse_mpoly("x1^2 - 1", 1)}, {2.0}).value, 9.0, 1e-9);

  MCEstimate v2 =
      eigen_stein_bound({MPoly::variable(2, 0), MPoly::variable(2, 1)}, {1.0, 1.0});
  CHECK_NEAR(v2.value, 0.0, 1e-14);
  CHECK_THROWS(eigen_stein_bound({parse_mpoly("x1^2", 1)}, {2.0}));
}

TEST_CASE("second-chaos variance/kurtosis comparison is an equality") {
  FourthMomentResult a = fourth_moment_bound(MPoly::variable(1, 0), 1);
  CHECK_NEAR(a.V2, 0.0, 1e-14);
  CHECK_NEAR(a.bound, 0.0, 1e-14);
  CHECK(a.exact);

  MPoly H2 = parse_mpoly("0.7071067811865476*x1^2 - 0.7071067811865476", 1);
  FourthMomentResult b = fourth_moment_bound(H2, 2);
  CHECK_NEAR(b.EF4, 15.0, 1e-9);
  CHECK_NEAR(b.V2, 2.0, 1e-9);
  CHECK_NEAR(b.bound, 2.0, 1e-9);

  FourthMomentResult c = fourth_moment_bound(parse_mpoly("x1^2 - 1", 1), 2);
  CHECK_NEAR(c.EF2, 2.0, 1e-12);
  CHECK_NEAR(c.EF4, 60.0, 1e-9);
  CHECK_NEAR(c.V2, 9.0, 1e-9);
  CHECK_NEAR(c.bound, 9.0, 1e-9);

  CHECK_THROWS(fourth_moment_bound(parse_mpoly("x1^2", 1), 2));
}

TEST_CASE("score-representation bound: stability and divergence detection") {
  UBoundResult triv = fisher_U_bound({MPoly::variable(1, 0)}, 100000);
  CHECK_NEAR(triv.estimate.value, 0.0, 1e-12);
  CHECK(!triv.divergence_flag);

  UBoundResult p5a = fisher_U_bound({pairs_poly(5)}, 1000000);
  UBoundResult p5b = fisher_U_bound({pairs_poly(5)}, 4100000);
  INFO("five pairs: ", p5a.estimate.value, " (se ", p5a.estimate.se, ") vs ",
       p5b.estimate.value, " (se ", p5b.estimate.se, ")");
  CHECK(!p5a.divergence_flag);
  CHECK(!p5b.divergence_flag);
  const double comb = std::sqrt(p5a.estimate.se * p5a.estimate.se +
                                p5b.estimate.se * p5b.estimate.se);
  CHECK(std::fabs(p5a.estimate.value - p5b.estimate.value) <= 3.0 * comb);

  UBoundResult p2 = fisher_U_bound({pairs_poly(2)}, 4100000);
  INFO("two pairs: share ", p2.max_share, ", growth events ", p2.growth_events);
  CHECK(p2.divergence_flag);

  CHECK_THROWS(fisher_U_bound({MPoly::variable(2, 0), MPoly::variable(2, 0)}, 10000));
}

TEST_CASE("entropy bound with normal reference for an eigenfunction vector") {
  NormalEntropyBound z = entropy_bound_normal({MPoly::variable(1, 0)}, 1.0, 50000);
  CHECK_NEAR(z.kappa, 3.0 / 14.0, 1e-15);
  CHECK_NEAR(z.bound, 0.0, 1e-14);

  MPoly H2 = parse_mpoly("0.7071067811865476*x1^2 - 0.7071067811865476", 1);
  NormalEntropyBound e = entropy_bound_normal({H2}, 0.25, 1000000);
  INFO("V2 = ", e.V2, ", A = ", e.A.value, ", B = ", e.B.value, ", bound = ", e.bound);
  CHECK_NEAR(e.V2, 2.0, 1e-9);
  CHECK(e.substitution_monotone);
  CHECK(e.A.value > 150.0);
  CHECK(e.A.value < 160.0);
  CHECK(e.B.value > 1.40);
  CHECK(e.B.value < 1.49);
  CHECK(e.bound > 105.0);
  CHECK(e.bound < 125.0);
  CHECK(e.note.find("nondecreasing") != std::string::npos);
}

TEST_CASE("entropy bound with gamma reference for a chi-square functional") {
  CHECK_THROWS(entropy_bound_gamma(parse_mpoly("x1^2", 1), 0.4, 1.0, 10000));
  try {
    entropy_bound_gamma(parse_mpoly("x1^2", 1), 0.4, 1.0, 10000);
  } catch (const std::exception& ex) {
    CHECK(std::string(ex.what()).find("p >= 1/2") != std::string::npos);
  }

  MPoly chi = parse_mpoly("0.5*x1^2 + 0.5*x2^2 + 0.5*x3^2", 3);
  GammaEntropyBound g = entropy_bound_gamma(chi, 1.5, 0.5, 400000, kDefaultSeed, true);
  INFO("A = ", g.A.value, ", B = ", g.B.value, ", rejected = ", g.rejected);
  CHECK_NEAR(g.kappa, (2.0 + 0.5) / (2.0 * (4.0 + 1.5)), 1e-15);
  CHECK(g.rejected < 10);
  CHECK(g.B.value > 0.77);
  CHECK(g.B.value < 0.83);
  REQUIRE(g.S2.has_value());
  CHECK(*g.S2 >= 0.0);
  CHECK(*g.S2 < 0.02);  // the law of F here *is* the reference
  REQUIRE(g.bound.has_value());
  CHECK(*g.bound >= 0.0);
  CHECK(std::isfinite(*g.bound));
}

TEST_CASE("moment growth tables for the three sample laws") {
  ConcentrationResult cg =
      concentration_moments("gaussian", 0.0, 0, {2, 3, 4, 6, 8, 12, 16}, 200000);
  for (const auto& row : cg.rows) {
    CHECK(row.Sp == 0.0);
    const double ratio = row.lhs / std::sqrt(row.p);
    INFO("p = ", row.p, ", ratio = ", ratio);
    CHECK(ratio > 0.5);
    CHECK(ratio < 1.1);
    CHECK(std::isnan(row.rosenthal_Sp));
  }
  CHECK(cg.c_min > 0.5);
  CHECK(cg.c_min < 1.0);

  ConcentrationResult cgam = concentration_moments("gamma", 1.0, 0, {2, 4, 8}, 200000);
  CHECK_NEAR(cgam.rows[0].Sp, 1.0, 1e-6);
  CHECK_NEAR(cgam.rows[0].tau_term, std::sqrt(2.0), 1e-9);
  CHECK(cgam.c_min < 1.2);

  ConcentrationResult cs = concentration_moments("gamma_sum", 1.0, 100, {2, 4, 8}, 200000);
  CHECK_NEAR(cs.rows[0].rosenthal_Sp, 0.4, 1e-6);
  CHECK_NEAR(cs.rows[0].Sp, 0.1, 5e-3);
  CHECK_NEAR(cs.rows[0].lhs, 1.0, 2e-2);
  CHECK(cs.c_min < 1.0);

  CHECK_THROWS(concentration_moments("gaussian", 0.0, 0, {1.5}, 1000));
  CHECK_THROWS(concentration_moments("weibull", 1.0, 0, {2.0}, 1000));
}

TEST_CASE("fitted tail exponents: near-gaussian sums vs a single exponential") {
  TailExponent t100 = tail_exponent_gamma_sum(1.0, 100, 1000000);
  INFO("n = 100 exponent: ", t100.kappa_hat);
  CHECK(t100.kappa_hat > 2.3);
  CHECK(t100.kappa_hat < 2.7);

  TailExponent t1 = tail_exponent_gamma_sum(1.0, 1, 1000000);
  INFO("n = 1 exponent: ", t1.kappa_hat);
  CHECK(t1.kappa_hat > 1.3);
  CHECK(t1.kappa_hat < 1.6);
  CHECK_NEAR(t1.survival[0], std::exp(-2.0), 2e-3);
}

TEST_CASE("normalized-sum discrepancy rate and entropy bound") {
  Target g3 = target_centered_gamma(3.0);
  std::vector<double> w(100, 0.1);
  CltResult c = sum_discrepancy_clt(g3, w, 1.0);
  INFO("alpha = ", c.alpha_a, ", bound = ", c.entropy_bound);
  CHECK_NEAR(c.alpha_a, 0.01, 1e-12);
  CHECK_NEAR(c.S2_base, 7.0, 5e-3);
  CHECK_NEAR(c.I_base, 2.0, 5e-4);
  CHECK(std::fabs(c.entropy_bound - 0.118538302547352) / 0.118538302547352 < 1e-3);
  REQUIRE(c.H_base.has_value());
  CHECK_NEAR(*c.H_base, 0.5713600228677, 5e-6);
  REQUIRE(c.poincare_bound.has_value());
  CHECK_NEAR(*c.poincare_bound, 0.01 / (0.5 + 0.5 * 0.01) * *c.H_base, 1e-12);

  CltResult c1 = sum_discrepancy_clt(g3, {1.0});
  CHECK_NEAR(c1.entropy_bound, hsi_rhs(c1.S2_base, c1.I_base), 1e-12);
  CHECK_THROWS(sum_discrepancy_clt(g3, {0.5, 0.5}));
}

TEST_CASE("sum histogram: deterministic, normalized, nonnegative") {
  Target g3 = target_centered_gamma(3.0);
  std::vector<double> w(10, 1.0 / std::sqrt(10.0));
  auto h1 = clt_histogram(g3, w, 20000, kDefaultSeed);
  auto h2 = clt_histogram(g3, w, 20000, kDefaultSeed);
  REQUIRE(h1.size() == 81);
  CHECK(h1 == h2);
  double mass = 0.0;
  const double width = h1[1].first - h1[0].first;
  for (const auto& [x, d] : h1) {
    CHECK(d >= 0.0);
    mass += d * width;
  }
  CHECK(mass > 0.97);
  CHECK(mass <= 1.0 + 1e-9);
}
