#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steinlab/functionals.hpp"
#include "steinlab/measures.hpp"
#include "steinlab/mpoly.hpp"
#include "steinlab/rng.hpp"

namespace steinlab {

struct MCEstimate {
  double value = 0.0;
  double se = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  bool flagged = false;
  std::string note;
};

// Ornstein-Uhlenbeck generator L F = Delta F - x . grad F, exactly.
MPoly ou_apply(const MPoly& F);
// Carre du champ Gamma(F,G) = grad F . grad G, exactly.
MPoly carre_du_champ(const MPoly& F, const MPoly& G);
// lambda > 0 with L F = -lambda F as exact polynomials, if any.
std::optional<double> eigen_check(const MPoly& F);

// V^2 = sum_{ij} lambda_i^{-2} Var(Gamma(F_i,F_j)) + ||C - Id||_F^2 for an
// eigenfunction vector; exact Gaussian moments when total degree permits
// (<= 12), Monte Carlo otherwise.
MCEstimate eigen_stein_bound(const std::vector<MPoly>& F,
                             const std::vector<double>& lambda,
                             long samples = 1000000, std::uint64_t seed = kDefaultSeed);

// Chaos-k comparison V^2 <= (E F^2 - 1)^2 + ((k-1)/(3k)) (E F^4 - 3 (E F^2)^2).
struct FourthMomentResult {
  double V2 = 0.0, bound = 0.0;
  double EF2 = 0.0, EF4 = 0.0;
  bool exact = true;  // both sides by exact moments
  double se = 0.0;    // combined MC standard error when not exact
};
FourthMomentResult fourth_moment_bound(const MPoly& F, int k,
                                       long samples = 1000000,
                                       std::uint64_t seed = kDefaultSeed);

// Monte Carlo bound on the relative Fisher information of the law of F:
// I <= int |U|^2 dmu with U = Gtilde^{-1} L F + V + F, assembled through the
// adjugate representation so every numerator is polynomial. Divergence is
// detected on a doubling sample schedule (repeated >20% growth of the running
// estimate) combined with a max-term dominance share, a standard heavy-tail
// diagnostic.
struct UBoundResult {
  MCEstimate estimate;
  bool divergence_flag = false;
  int growth_events = 0;
  double max_share = 0.0;  // largest |U|^2 term / total
  std::vector<std::pair<long, double>> schedule;  // (cumulative n, running mean)
};
UBoundResult fisher_U_bound(const std::vector<MPoly>& F, long samples = 4100000,
                            std::uint64_t seed = kDefaultSeed);

// Normal entropic bound: H <= S^2/(2(1-4 kappa)) Psi(2(A_F + d(B_F+1))/S^2),
// kappa = (2+alpha)/(2(4+3 alpha)); S^2 is replaced by the eigenfunction
// upper bound V^2 >= S^2, which is always valid since r -> r Psi(c/r) is
// globally nondecreasing (checked numerically and reported).
struct NormalEntropyBound {
  double V2 = 0.0;
  MCEstimate A, B;
  double kappa = 0.0;
  double bound = 0.0;
  bool substitution_monotone = true;
  std::string note;
};
NormalEntropyBound entropy_bound_normal(const std::vector<MPoly>& F, double alpha,
                                        long samples = 1000000,
                                        std::uint64_t seed = kDefaultSeed);

// Gamma-reference entropic bound for a nonnegative functional F:
//   A_F = int F^{-1} [F|LF| + Gamma(F) + F|Gamma(F,Gamma(F))| + p + F]^2 dmu,
//   B_F = int Gamma(F)^{-alpha} dmu,
//   H <= S^2/(2(1-4 kappa)) Psi(2(A_F + B_F + 1)/S^2).
// Samples with F < 1e-12 are rejected and counted. S against the gamma
// reference is optionally estimated from a KDE-smoothed density of F.
struct GammaEntropyBound {
  MCEstimate A, B;
  double kappa = 0.0;
  long rejected = 0;
  std::optional<double> S2;  // present when estimate_S
  std::optional<double> bound;
  std::string note;
};
GammaEntropyBound entropy_bound_gamma(const MPoly& F, double p, double alpha,
                                      long samples = 400000,
                                      std::uint64_t seed = kDefaultSeed,
                                      bool estimate_S = false);

// Moment-growth table: empirical ||u||_p against the kernel moment bound
// C [ S_p + sqrt(p) (int ||tau||^{p/2} dnu)^{1/p} ]. Laws: "gaussian",
// "gamma" (centered, shape p), "gamma_sum" (normalized sum of n centered
// gamma variables, with the Jensen upper estimate of its S_p and the
// explicit O(p) constant K_p = 2p for comparison).
struct ConcentrationRow {
  double p = 0.0;
  double lhs = 0.0;       // empirical ||u||_p
  double Sp = 0.0;        // S_p (analytic or Jensen-MC)
  double tau_term = 0.0;  // sqrt(p) (E ||tau||^{p/2})^{1/p}
  double rhs_unit = 0.0;  // Sp + tau_term  (bound with C = 1)
  double c_required = 0.0;
  double rosenthal_Sp = kNaN;  // K_p n^{-1/2} S_p(base), sums only
};
struct ConcentrationResult {
  std::string law;
  std::vector<ConcentrationRow> rows;
  double c_min = 0.0;  // smallest C making the bound hold across p_list
  long samples = 0;
};
ConcentrationResult concentration_moments(const std::string& law, double shape, int n,
                                          const std::vector<double>& ps, long samples,
                                          std::uint64_t seed = kDefaultSeed);

// One-sided Gaussian-window tail fit for the normalized sum of n centered
// Gamma(shape) variables: survival on r in {1.0, 1.125, ..., 2.0}, fitted
// exponent kappa_hat = -dlog P(T >= r)/dlog r by least squares.
struct TailExponent {
  double kappa_hat = 0.0;
  std::vector<double> r, survival;
  long samples = 0;
};
TailExponent tail_exponent_gamma_sum(double shape, int n, long samples,
                                     std::uint64_t seed = kDefaultSeed);

// Entropic CLT rate for T = sum a_k X_k with sum a_k^2 = 1:
//   alpha(a) = sum a_k^4,  S^2(T) <= alpha S^2,  I(T) <= I,
//   H(T) <= 1/2 alpha S^2 log(1 + I/(alpha S^2)),
// with the Poincare-rate comparison alpha/(c/2+(1-c/2)alpha) H when c given.
struct CltResult {
  double alpha_a = 0.0;
  double S2_base = 0.0, I_base = 0.0;
  double S2_bound = 0.0, I_bound = 0.0;
  double entropy_bound = 0.0;
  std::optional<double> poincare_bound;
  std::optional<double> H_base;
};
CltResult sum_discrepancy_clt(const Target& base, const std::vector<double>& weights,
                              std::optional<double> poincare_c = std::nullopt,
                              const QuadOptions& opt = default_quad_options());

// Histogram of Monte Carlo samples of T (visual sanity CSV; no entropy
// estimation from samples).
std::vector<std::pair<double, double>> clt_histogram(const Target& base,
                                                     const std::vector<double>& weights,
                                                     long samples, std::uint64_t seed,
                                                     int bins = 81);

}  // namespace steinlab
