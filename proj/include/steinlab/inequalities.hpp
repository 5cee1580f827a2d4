#pragma once

#include <map>
#include <string>
#include <vector>

#include "steinlab/functionals.hpp"
#include "steinlab/measures.hpp"

namespace steinlab {

// One verified statement. Limit cases follow the explicit conventions
//   0 log(1 + s/0) = 0,  inf log(1 + s/inf) = s,  r log(1 + inf/r) = inf,
// and the branch that fired is recorded in `convention`.
struct InequalityReport {
  std::string kind;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double tolerance = 0.0;
  bool holds = false;
  bool indeterminate = false;
  std::string convention;
  std::map<std::string, double> inputs;
  std::string note;
};

// Verification tolerance: slack >= -1e-7 * max(1, rhs).
double verify_tolerance(double rhs);

// Psi(r) = r on [0,1], 1 + log r on [1, inf).
double psi_fn(double r);

// Right-hand sides with limit conventions (convention string optionally
// reported). S2 denotes the squared discrepancy.
double hsi_rhs(double S2, double I, std::string* convention = nullptr);
double hsi_improved_rhs(double S2, double I);
double wsh_rhs(double S, double H, std::string* convention = nullptr);

const std::vector<std::string>& inequality_kinds();

struct VerifyOptions {
  double t = 1.0;            // entropy_decay evaluation time
  double p = 1.0;            // wp order
  double cov = 1.0;          // hsi_cov reference variance (1D path)
  QuadOptions quad = default_quad_options();
};

InequalityReport verify(const std::string& kind, const Target& t,
                        const VerifyOptions& opt = VerifyOptions{});
std::vector<InequalityReport> verify_all(const Target& t,
                                         const VerifyOptions& opt = VerifyOptions{});

// General-reference entropy bound under the curvature criteria with
// constants (rho, kappa, sigma):
//   H <= (1/(2 sigma)) S^2 Psi(sigma max(rho,kappa) I / (rho kappa S^2)).
// When S diverges the Psi linear branch gives the finite continuity limit
// max(rho,kappa) I/(2 rho kappa), which is the matching log-Sobolev form.
InequalityReport verify_general_hsi(const Target& t, const Reference& ref,
                                    double rho, double kappa, double sigma,
                                    const QuadOptions& opt = default_quad_options());

// Transport analogue W2(nu, ref) <= (2/sqrt(kappa sigma)) S.
InequalityReport verify_w2s_general(const Target& t, const Reference& ref,
                                    double rho, double kappa, double sigma,
                                    const QuadOptions& opt = default_quad_options());

// Default curvature constants per reference family: Gaussian (1,1,1),
// Gamma (1/2,1/2,1/2), Jacobi (1,1,1/2), log-concave (c,3c,1).
struct GeneralConstants {
  double rho = 1.0, kappa = 1.0, sigma = 1.0;
};
GeneralConstants general_constants(const Reference& ref, double c = 0.0);

// Weighted form for a reference covariance (1D path, reference N(0, c)):
// H(nu|N(0,c)) <= 1/2 ||tau/c - 1||_{2,nu}^2 log(1 + c I / ||tau/c - 1||^2).
InequalityReport verify_hsi_cov(const Target& t, double ref_variance,
                                const QuadOptions& opt = default_quad_options());
// Exact matrix form for Gaussian target N(0, Ct) against N(0, Cr), any
// small dimension (row-major square matrices).
InequalityReport verify_hsi_cov_gaussian(const std::vector<std::vector<double>>& cov_target,
                                         const std::vector<std::vector<double>>& cov_ref);

// Interpolation surface between the transport and discrepancy entropy
// bounds, on the triangle 0 < alpha <= beta <= 1:
//   phi(alpha,beta) = 1/2 [ alpha I + (alpha - log alpha) S^2
//                           + ((1-beta)/beta) W2^2 + (log beta - beta) S^2 ].
// At alpha = beta = W2/sqrt(I) it reduces exactly to the HWI rhs
// W2 sqrt(I) - W2^2/2; at beta = 1 with alpha = S^2/(S^2+I) exactly to the
// HSI rhs.
double hwsi_phi_terms(double I, double S2, double W2, double alpha, double beta);
double hwsi_phi(const Target& t, double alpha, double beta,
                const QuadOptions& opt = default_quad_options());

struct HwsiMin {
  double alpha = 1.0, beta = 1.0, value = 0.0;
  std::string boundary;  // "alpha=beta", "beta=1", or "interior"
};
HwsiMin hwsi_phi_min(const Target& t, const QuadOptions& opt = default_quad_options());

// Two-scale mixture sweep comparing the transport and discrepancy entropy
// bounds as the spike sharpens.
struct SweepRow {
  double n = 0.0, a = 0.0;
  double H = 0.0, I = 0.0, S2 = 0.0, W2 = 0.0;
  double hwi_rhs = 0.0, hsi_rhs = 0.0;
  bool hwi_holds = false, hsi_holds = false;
  bool hsi_budget_ok = false;  // hsi_rhs <= a log(1+n^2) + tol
};
std::vector<SweepRow> counterexample_sweep(const std::vector<double>& ns,
                                           const std::vector<double>& as = {},
                                           const QuadOptions& opt = default_quad_options());

}  // namespace steinlab
