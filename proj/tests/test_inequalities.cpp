#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "steinlab/inequalities.hpp"
#include "steinlab/measures.hpp"

using namespace steinlab;

#define CHECK_NEAR(a, b, tol)                                                  \
  do {                                                                         \
    const double va = (a), vb = (b);                                           \
    INFO(#a " = ", va, ", " #b " = ", vb);                                     \
    CHECK(std::fabs(va - vb) <= (tol));                                        \
  } while (0)

TEST_CASE("interpolation function psi") {
  CHECK(psi_fn(0.5) == 0.5);
  CHECK(psi_fn(1.0) == 1.0);
  CHECK_NEAR(psi_fn(std::exp(1.0)), 2.0, 1e-15);
}

TEST_CASE("entropy bound right-hand side: limiting conventions") {
  std::string conv;
  CHECK(hsi_rhs(0.0, 3.0, &conv) == 0.0);
  CHECK(conv == "0 log(1 + s/0) = 0");
  CHECK(hsi_rhs(kInf, 3.0, &conv) == 1.5);
  CHECK(conv == "inf log(1 + s/inf) = s");
  CHECK(std::isinf(hsi_rhs(2.0, kInf, &conv)));
  CHECK(conv == "r log(1 + inf/r) = inf");
  CHECK_NEAR(hsi_improved_rhs(1.0, 1.0), 0.25, 1e-12);
  // the series branch joins the closed form continuously near I = S^2
  CHECK_NEAR(hsi_improved_rhs(1.0, 1.0 + 5e-5) - hsi_improved_rhs(1.0, 1.0),
             5e-5 / 6.0, 1e-9);
}

TEST_CASE("scaled gaussian: every registered statement with frozen values") {
  Target n02 = target_gaussian_scale(2.0);

  InequalityReport r = verify("lsi", n02);
  CHECK_NEAR(r.lhs, 0.153426409720027, 1e-9);
  CHECK_NEAR(r.rhs, 0.25, 1e-8);
  CHECK(r.holds);

  r = verify("hsi", n02);
  CHECK_NEAR(r.rhs, 0.202732554054082, 1e-8);
  CHECK(r.holds);

  r = verify("hsi_improved", n02);
  CHECK_NEAR(r.rhs, 0.153426409720027, 1e-8);  // equality on this family
  CHECK(r.holds);

  r = verify("wsh", n02);
  CHECK_NEAR(r.lhs, 0.414213562373095, 1e-8);
  CHECK_NEAR(r.rhs, 0.539892618795638, 1e-8);
  CHECK(r.holds);

  r = verify("talagrand", n02);
  CHECK_NEAR(r.rhs, 0.553942974899091, 1e-8);
  CHECK(r.holds);

  r = verify("hwi", n02);
  CHECK_NEAR(r.rhs, 0.207106781186548, 1e-8);
  CHECK(r.holds);

  r = verify("w2s", n02);
  CHECK_NEAR(r.rhs, 1.0, 1e-8);
  CHECK(r.holds);

  VerifyOptions vo;
  vo.p = 1.0;
  r = verify("wp", n02, vo);
  CHECK_NEAR(r.lhs, 0.330494606292647, 1e-8);
  CHECK_NEAR(r.rhs, std::sqrt(2.0 / 3.14159265358979323846), 1e-8);
  CHECK(r.holds);

  r = verify("tv_stein", n02);
  CHECK_NEAR(r.lhs, 0.166064074983513, 1e-8);
  CHECK_NEAR(r.rhs, 2.0, 1e-7);
  CHECK(r.holds);

  r = verify("pinsker", n02);
  CHECK_NEAR(r.rhs, std::sqrt(0.5 * 0.153426409720027), 1e-8);
  CHECK(r.holds);

  vo = VerifyOptions{};
  vo.t = 1.0;
  r = verify("entropy_decay", n02, vo);
  CHECK_NEAR(r.lhs, 0.00420363609682, 1e-7);
  const double H0 = 0.153426409720027, E2 = std::exp(-2.0);
  CHECK_NEAR(r.rhs, E2 * E2 * H0 / (E2 + (1.0 - E2) * H0), 1e-8);
  CHECK(r.holds);
}

TEST_CASE("transport bound for p = 1 on the centered exponential") {
  Target g1 = target_centered_gamma(1.0);
  VerifyOptions vo;
  vo.p = 1.0;
  InequalityReport r = verify("wp", g1, vo);
  CHECK_NEAR(r.rhs, 0.58705065269496, 2e-6);
  CHECK(r.holds);
}

TEST_CASE("the full battery holds on the scaled gaussian") {
  auto all = verify_all(target_gaussian_scale(2.0));
  CHECK(all.size() == 12);
  for (const auto& r : all) {
    INFO("kind = ", r.kind);
    CHECK(r.holds);
    CHECK(!r.indeterminate);
  }
}

TEST_CASE("divergent information falls back to the limiting convention") {
  Target u = target_uniform();
  InequalityReport r = verify("hsi", u);
  CHECK(r.holds);
  CHECK(std::isinf(r.rhs));
  r = verify("wsh", u);
  CHECK(r.holds);
}

TEST_CASE("scale-adapted entropy bound, scalar and matrix paths") {
  Target n02 = target_gaussian_scale(2.0);
  InequalityReport r = verify_hsi_cov(n02, 2.0);  // reference variance matches
  CHECK_NEAR(r.lhs, 0.0, 1e-9);
  CHECK_NEAR(r.rhs, 0.0, 1e-7);
  CHECK(r.holds);

  r = verify_hsi_cov(n02, 1.0);
  CHECK_NEAR(r.rhs, 0.202732554054082, 1e-7);

  r = verify_hsi_cov_gaussian({{2.0, 0.0}, {0.0, 1.0}}, {{1.0, 0.0}, {0.0, 1.0}});
  CHECK_NEAR(r.lhs, 0.153426409720027, 1e-12);
  CHECK_NEAR(r.rhs, 0.202732554054082, 1e-12);

  r = verify_hsi_cov_gaussian({{1.5, 0.2}, {0.2, 0.9}}, {{1.0, 0.3}, {0.3, 1.0}});
  INFO("correlated lhs = ", r.lhs, ", rhs = ", r.rhs);
  CHECK(r.holds);
}

TEST_CASE("two-parameter interpolation surface and its minimizer") {
  const double I = 0.5, S2 = 1.0, W2 = 0.414213562373095;
  CHECK_NEAR(hwsi_phi_terms(I, S2, W2, S2 / (S2 + I), 1.0), 0.202732554054082, 1e-12);
  const double a = W2 / std::sqrt(I);
  CHECK_NEAR(hwsi_phi_terms(I, S2, W2, a, a), 0.207106781186548, 1e-12);

  HwsiMin m = hwsi_phi_min(target_gaussian_scale(2.0));
  INFO("alpha = ", m.alpha, ", beta = ", m.beta, ", value = ", m.value);
  CHECK_NEAR(m.value, 0.202732554054082, 1e-6);
  CHECK(m.value <= 0.202732554054082 + 1e-9);
  CHECK(m.boundary == "beta=1");
}

TEST_CASE("single sweep row: frozen right-hand sides and holding flags") {
  auto rows = counterexample_sweep({100.0});
  REQUIRE(rows.size() == 1);
  CHECK_NEAR(rows[0].a, 0.1, 1e-15);
  CHECK_NEAR(rows[0].hsi_rhs, 0.383762, 2e-4);
  CHECK_NEAR(rows[0].hwi_rhs, 2.17417, 2e-3);
  CHECK(rows[0].hsi_holds);
  CHECK(rows[0].hwi_holds);
  CHECK(rows[0].hsi_budget_ok);
}

TEST_CASE("general-reference entropy bound: tilted gamma, constants (1/2,1/2,1/2)") {
  Reference g3 = ref_gamma(3.0);
  GeneralConstants gc = general_constants(g3);
  CHECK_NEAR(gc.rho + gc.kappa + gc.sigma, 1.5, 0.0);
  Target tilt = gamma_tilt_quadratic(3.0, 0.08);
  InequalityReport gr = verify_general_hsi(tilt, g3, gc.rho, gc.kappa, gc.sigma);
  INFO("H = ", gr.lhs, ", rhs = ", gr.rhs);
  CHECK_NEAR(gr.lhs, 0.0578, 5e-4);
  CHECK(gr.holds);
  CHECK(gr.slack > 0);

  InequalityReport wr = verify_w2s_general(tilt, g3, gc.rho, gc.kappa, gc.sigma);
  CHECK_NEAR(wr.lhs, 0.5459, 5e-4);
  CHECK(wr.holds);

  CHECK_THROWS_AS(verify_general_hsi(tilt, ref_gamma(0.3), 0.5, 0.5, 0.5),
                  std::invalid_argument);
}

TEST_CASE("kernel-based bound is never above the information bound") {
  std::vector<Target> battery;
  for (double s2 : {0.5, 1.5, 2.0, 4.0}) battery.push_back(target_gaussian_scale(s2));
  battery.push_back(target_centered_gamma(1.0));
  battery.push_back(target_centered_gamma(3.0));
  battery.push_back(target_mixture(10.0, 0.1));
  battery.push_back(target_student_like(3.0));
  for (const auto& t : battery) {
    auto rh = verify("hsi", t);
    auto rl = verify("lsi", t);
    auto rw = verify("wsh", t);
    auto rt = verify("talagrand", t);
    INFO("target, hsi rhs = ", rh.rhs, ", lsi rhs = ", rl.rhs);
    if (!std::isinf(rl.rhs)) CHECK(rh.rhs <= rl.rhs + 1e-9);
    CHECK(rw.rhs <= rt.rhs + 1e-9);
    CHECK(rh.holds);
    CHECK(rl.holds);
    CHECK(rw.holds);
    CHECK(rt.holds);
  }
}

TEST_CASE("series-improved bound never exceeds the plain one") {
  for (double s2 : {1.5, 2.0, 4.0}) {
    Target t = target_gaussian_scale(s2);
    auto ri = verify("hsi_improved", t);
    auto rh = verify("hsi", t);
    CHECK(ri.rhs <= rh.rhs + 1e-9);
    CHECK_NEAR(ri.rhs, ri.lhs, 1e-7);  // equality on the scale family
  }
}
