#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/functionals.hpp"
#include "steinlab/measures.hpp"
#include "steinlab/numeric.hpp"

using namespace steinlab;

// absolute-difference check with the computed values in the failure message
#define CHECK_NEAR(a, b, tol)                                                  \
  do {                                                                         \
    const double va = (a), vb = (b);                                           \
    INFO(#a " = ", va, ", " #b " = ", vb);                                     \
    CHECK(std::fabs(va - vb) <= (tol));                                        \
  } while (0)

TEST_CASE("scaled gaussian against the standard normal: closed forms") {
  Reference g = ref_gaussian();
  Target t = target_gaussian_scale(2.0);

  CHECK_NEAR(relative_entropy(t, g).value, 0.153426409720027, 1e-9);
  CHECK_NEAR(fisher_information(t, g).value, 0.5, 1e-7);

  auto k = stein_kernel(t, g);
  CHECK(k.valid);
  CHECK_NEAR(k(0.7), 2.0, 1e-9);
  CHECK_NEAR(sqr(stein_discrepancy(t, g, k).value), 1.0, 1e-8);

  auto d = discrepancy_decomposition(t, k);
  CHECK_NEAR(d.variance_part, 0.0, 1e-7);
  CHECK_NEAR(d.covariance_part, 1.0, 1e-7);

  CHECK_NEAR(total_variation(t, g).value, 0.166064074983513, 1e-9);
  CHECK_NEAR(wasserstein(t, g, 1.0).value, 0.330494606292647, 1e-8);
  CHECK_NEAR(wasserstein(t, g, 2.0).value, 0.414213562373095, 1e-8);
  CHECK_NEAR(stein_identity_residual(t, g, k, {0.0, 1.0, 0.5, 0.25}), 0.0, 1e-8);
}

TEST_CASE("centered exponential: entropy finite, score singular at the edge") {
  Reference g = ref_gaussian();
  Target t = target_centered_gamma(1.0);
  CHECK_NEAR(relative_entropy(t, g).value, 0.418938533204673, 1e-9);
  CHECK(fisher_information(t, g).diverged);
}

TEST_CASE("centered gamma(3): kernel is affine, discrepancy exact") {
  Reference g = ref_gaussian();
  Target t = target_centered_gamma(3.0);
  CHECK_NEAR(relative_entropy(t, g).value, 0.5713600228677, 1e-9);
  CHECK_NEAR(fisher_information(t, g).value, 2.0, 5e-4);
  auto k = stein_kernel(t, g);
  CHECK_NEAR(k(0.5), 3.5, 1e-8);
  CHECK_NEAR(sqr(stein_discrepancy(t, g, k).value), 7.0, 1e-6);
}

TEST_CASE("uniform: polynomial kernel, divergent score") {
  Reference g = ref_gaussian();
  Target t = target_uniform();
  CHECK_NEAR(sqr(stein_discrepancy(t, g).value), 7.0 / 15.0, 1e-9);
  CHECK(fisher_information(t, g).diverged);
  CHECK_NEAR(relative_entropy(t, g).value, 0.392458019311394, 1e-9);
}

TEST_CASE("two-scale mixture functionals") {
  Reference g = ref_gaussian();
  Target t = target_mixture(10.0, 0.1);
  CHECK_NEAR(relative_entropy(t, g).value, 0.025767, 2e-6);
  CHECK_NEAR(fisher_information(t, g).value, 2.48672, 2e-5);
  CHECK_NEAR(sqr(stein_discrepancy(t, g).value), 0.041145, 2e-6);
}

TEST_CASE("heavy-tailed family with matching rational kernel") {
  Reference g = ref_gaussian();
  Target t = target_student_like(3.0);
  CHECK_NEAR(target_moment(t, 2), 1.0 / 3.0, 1e-8);
  CHECK_NEAR(target_moment(t, 4), 1.0, 1e-6);
  CHECK_NEAR(relative_entropy(t, g).value, 0.26282148367395924, 1e-7);
  CHECK_NEAR(fisher_information(t, g).value, 25.0 / 12.0, 1e-5);
  auto k = stein_kernel(t, g);
  CHECK_NEAR(k(1.3), (1.0 + 1.3 * 1.3) / 4.0, 1e-7);
  CHECK_NEAR(sqr(stein_discrepancy(t, g, k).value), 0.5, 2e-5);
}

TEST_CASE("drift-ratio kernel matches its closed form") {
  PearsonParams pp;  // centered gamma p=3
  pp.a0 = 1.0; pp.a1 = 1.0; pp.b0 = 3.0; pp.b1 = 1.0; pp.b2 = 0.0;
  pp.lo = -3.0;
  auto pk = stein_kernel_pearson(pp);
  CHECK(pk.valid);
  CHECK_NEAR(pk(0.5), 3.5, 1e-12);

  PearsonParams ps;  // (1+x^2)^{-3}
  ps.a0 = 0.0; ps.a1 = 6.0; ps.b0 = 1.0; ps.b1 = 0.0; ps.b2 = 1.0;
  CHECK_NEAR(stein_kernel_pearson(ps)(2.0), 1.25, 1e-12);

  PearsonParams pu;  // uniform on [-1,1]
  pu.a0 = 0.0; pu.a1 = 0.0; pu.b0 = 1.0; pu.b1 = 0.0; pu.b2 = -1.0;
  pu.lo = -1.0; pu.hi = 1.0;
  CHECK_NEAR(stein_kernel_pearson(pu)(0.5), 0.375, 1e-12);
}

TEST_CASE("functionals against a gamma reference (quadratic tilt)") {
  Reference gp = ref_gamma(3.0);
  Target t = gamma_tilt_quadratic(3.0, 0.08);
  CHECK_NEAR(relative_entropy(t, gp).value, 0.0578, 5e-4);
  CHECK_NEAR(fisher_information(t, gp).value, 0.2155, 5e-4);
  auto k = stein_kernel(t, gp);
  CHECK(k.valid);
  CHECK_NEAR(sqr(stein_discrepancy(t, gp, k).value), 0.3349, 5e-4);
  CHECK_NEAR(wasserstein(t, gp, 2.0).value, 0.5459, 5e-4);
}

TEST_CASE("functionals against a gamma reference (cubic tilt)") {
  Reference gp = ref_gamma(3.0);
  Target t = gamma_tilt_cubic(3.0, 0.01);
  CHECK_NEAR(relative_entropy(t, gp).value, 0.0135, 5e-4);
  CHECK_NEAR(fisher_information(t, gp).value, 0.0785, 5e-4);
  CHECK_NEAR(sqr(stein_discrepancy(t, gp).value), 0.0483, 5e-4);
  CHECK_NEAR(wasserstein(t, gp, 2.0).value, 0.2307, 5e-4);
}

TEST_CASE("functionals against the jacobi reference") {
  Reference j = ref_jacobi();
  Target t = uniform_tilt_quadratic(0.3);
  CHECK_NEAR(relative_entropy(t, j).value, 0.0088, 5e-4);
  CHECK_NEAR(fisher_information(t, j).value, 0.1046, 5e-4);
  CHECK_NEAR(sqr(stein_discrepancy(t, j).value), 0.0297, 5e-4);
  CHECK_NEAR(wasserstein(t, j, 2.0).value, 0.0414, 5e-4);
}
