#include "steinlab/inequalities.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "steinlab/numeric.hpp"
#include "steinlab/ou_semigroup.hpp"

namespace steinlab {

double verify_tolerance(double rhs) { return 1e-7 * std::max(1.0, rhs); }

double psi_fn(double r) {
  if (std::isnan(r) || r < 0.0) return kNaN;
  if (r <= 1.0) return r;
  if (std::isinf(r)) return kInf;
  return 1.0 + std::log(r);
}

// ---------------------------------------------------------------------------
// Right-hand sides with limit conventions

double hsi_rhs(double S2, double I, std::string* convention) {
  if (convention) convention->clear();
  if (S2 == 0.0) {
    if (convention) *convention = "0 log(1 + s/0) = 0";
    return 0.0;
  }
  if (std::isinf(S2)) {
    if (convention) *convention = "inf log(1 + s/inf) = s";
    return 0.5 * I;
  }
  if (std::isinf(I)) {
    if (convention) *convention = "r log(1 + inf/r) = inf";
    return kInf;
  }
  return 0.5 * S2 * std::log1p(I / S2);
}

double hsi_improved_rhs(double S2, double I) {
  if (I == 0.0) return 0.0;
  if (std::isinf(S2)) return 0.5 * I;  // same linearization as the plain form
  if (std::isinf(I) || S2 == 0.0) return kInf;
  const double eps = I / S2 - 1.0;
  if (std::fabs(eps) < 1e-4) {
    // Series about the equal-value point, where the closed form is 0/0.
    return S2 * (0.25 + eps / 6.0 - eps * eps / 24.0);
  }
  const double D = S2 - I;
  return S2 * I / (2.0 * D) * (1.0 + (I / D) * std::log(I / S2));
}

double wsh_rhs(double S, double H, std::string* convention) {
  if (convention) convention->clear();
  if (S == 0.0) {
    if (convention) *convention = "0 * arccos = 0";
    return 0.0;
  }
  if (std::isinf(S)) {
    if (convention) *convention = "S = inf -> sqrt(2H) limit";
    return std::sqrt(2.0 * H);
  }
  if (std::isinf(H)) return S * std::acos(0.0);  // arccos(e^{-inf}) = pi/2
  const double c = std::exp(-H / (S * S));
  return S * std::acos(std::min(1.0, c));
}

const std::vector<std::string>& inequality_kinds() {
  static const std::vector<std::string> kinds = {
      "lsi",  "hsi", "hsi_improved", "hsi_cov", "wsh",     "talagrand",
      "hwi",  "w2s", "wp",           "tv_stein", "pinsker", "entropy_decay"};
  return kinds;
}

namespace {

// Lazy functional bundle against the standard Gaussian; each quantity is
// computed at most once per verification run.
struct Ctx {
  const Target& t;
  const QuadOptions& opt;
  Reference ref = ref_gaussian();
  std::optional<SteinKernel> ker;
  std::optional<FunctionalValue> fH, fI, fS, fW2, fTV;

  Ctx(const Target& t_, const QuadOptions& o) : t(t_), opt(o) {}

  const SteinKernel& kernel() {
    if (!ker) ker = stein_kernel(t, ref, opt);
    return *ker;
  }
  const FunctionalValue& H() {
    if (!fH) fH = relative_entropy(t, ref, opt);
    return *fH;
  }
  const FunctionalValue& I() {
    if (!fI) fI = fisher_information(t, ref, opt);
    return *fI;
  }
  const FunctionalValue& S() {
    if (!fS) fS = stein_discrepancy(t, ref, kernel(), 2.0, opt);
    return *fS;
  }
  const FunctionalValue& W2() {
    if (!fW2) fW2 = wasserstein(t, ref, 2.0, opt);
    return *fW2;
  }
  const FunctionalValue& TV() {
    if (!fTV) fTV = total_variation(t, ref, opt);
    return *fTV;
  }
};

double cp_constant(double p) {
  // C_p^p = int |x|^p dgamma^1 = 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
  const double log_cpp = 0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) -
                         0.5 * std::log(3.14159265358979323846);
  return std::exp(log_cpp / p);
}

void finalize(InequalityReport& r) {
  r.slack = r.rhs - r.lhs;
  r.tolerance = verify_tolerance(r.rhs);
  if (std::isnan(r.slack)) {
    r.holds = false;
    r.indeterminate = true;
  } else {
    r.holds = !r.indeterminate && r.slack >= -r.tolerance;
  }
}

void mark_indeterminate(InequalityReport& r, const std::string& why) {
  r.indeterminate = true;
  r.holds = false;
  if (!r.note.empty()) r.note += "; ";
  r.note += why;
}

}  // namespace

InequalityReport verify(const std::string& kind, const Target& t, const VerifyOptions& opt) {
  InequalityReport r;
  r.kind = kind;
  Ctx c(t, opt.quad);

  auto need = [&](const FunctionalValue& fv, const char* label) -> double {
    if (fv.diverged && std::isnan(fv.value)) {
      mark_indeterminate(r, std::string(label) + " unavailable: " + fv.note);
      return kNaN;
    }
    return fv.or_inf();
  };

  if (kind == "lsi") {
    const double H = need(c.H(), "H"), I = need(c.I(), "I");
    r.lhs = H;
    r.rhs = 0.5 * I;
    r.inputs = {{"H", H}, {"I", I}};
  } else if (kind == "hsi") {
    const double H = need(c.H(), "H"), I = need(c.I(), "I"), S = need(c.S(), "S");
    r.lhs = H;
    r.rhs = hsi_rhs(S * S, I, &r.convention);
    r.inputs = {{"H", H}, {"I", I}, {"S", S}};
  } else if (kind == "hsi_improved") {
    const double H = need(c.H(), "H"), I = need(c.I(), "I"), S = need(c.S(), "S");
    r.lhs = H;
    r.rhs = hsi_improved_rhs(S * S, I);
    if (S * S == I && I > 0.0) r.convention = "S^2 = I continuity limit S^2/4";
    r.inputs = {{"H", H}, {"I", I}, {"S", S}};
  } else if (kind == "hsi_cov") {
    return verify_hsi_cov(t, opt.cov, opt.quad);
  } else if (kind == "wsh") {
    const double H = need(c.H(), "H"), S = need(c.S(), "S"), W2 = need(c.W2(), "W2");
    r.lhs = W2;
    r.rhs = wsh_rhs(S, H, &r.convention);
    r.inputs = {{"H", H}, {"S", S}, {"W2", W2}};
  } else if (kind == "talagrand") {
    const double H = need(c.H(), "H"), W2 = need(c.W2(), "W2");
    r.lhs = W2;
    r.rhs = std::sqrt(2.0 * H);
    r.inputs = {{"H", H}, {"W2", W2}};
  } else if (kind == "hwi") {
    const double H = need(c.H(), "H"), I = need(c.I(), "I"), W2 = need(c.W2(), "W2");
    r.lhs = H;
    if (W2 == 0.0)
      r.rhs = 0.0;
    else if (std::isinf(I))
      r.rhs = kInf;
    else
      r.rhs = W2 * std::sqrt(I) - 0.5 * W2 * W2;
    r.inputs = {{"H", H}, {"I", I}, {"W2", W2}};
  } else if (kind == "w2s") {
    const double S = need(c.S(), "S"), W2 = need(c.W2(), "W2");
    r.lhs = W2;
    r.rhs = S;
    r.inputs = {{"S", S}, {"W2", W2}};
  } else if (kind == "wp") {
    const double p = opt.p;
    if (!(p >= 1.0)) throw std::invalid_argument("verify(wp): p must be >= 1");
    FunctionalValue wp = wasserstein(t, c.ref, p, opt.quad);
    FunctionalValue sp = stein_discrepancy(t, c.ref, c.kernel(), p, opt.quad);
    const double W = need(wp, "Wp"), Sp = need(sp, "Sp");
    const double Cp = cp_constant(p);
    r.lhs = W;
    r.rhs = Cp * Sp;  // in one dimension both dimension factors equal 1
    r.inputs = {{"Wp", W}, {"Sp", Sp}, {"C_p", Cp}, {"p", p}};
  } else if (kind == "tv_stein") {
    const double TV = need(c.TV(), "TV");
    FunctionalValue s1 = stein_discrepancy(t, c.ref, c.kernel(), 1.0, opt.quad);
    const double S1 = need(s1, "S1");
    r.lhs = TV;
    r.rhs = 2.0 * S1;
    r.inputs = {{"TV", TV}, {"S1", S1}};
  } else if (kind == "pinsker") {
    const double TV = need(c.TV(), "TV"), H = need(c.H(), "H");
    r.lhs = TV;
    r.rhs = std::sqrt(0.5 * H);
    r.inputs = {{"TV", TV}, {"H", H}};
  } else if (kind == "entropy_decay") {
    const double time = opt.t;
    if (!(time >= 0.0)) throw std::invalid_argument("verify(entropy_decay): t must be >= 0");
    const double H0 = need(c.H(), "H"), S = need(c.S(), "S");
    const double S2 = S * S;
    Evolved ev(t, time, opt.quad);
    FunctionalValue ht = ev.entropy();
    const double Ht = need(ht, "H_t");
    r.lhs = Ht;
    const double E2 = std::exp(-2.0 * time);
    const double om = -std::expm1(-2.0 * time);  // 1 - e^{-2t}
    if (time == 0.0) {
      r.rhs = H0;
    } else if (std::isinf(S2)) {
      r.convention = "S = inf -> exponential decay e^{-2t} H";
      r.rhs = E2 * H0;
    } else if (S2 == 0.0) {
      r.rhs = 0.0;
    } else if (std::isinf(H0)) {
      r.convention = "H = inf -> discrepancy cap e^{-4t} S^2/(1-e^{-2t})";
      r.rhs = E2 * E2 * S2 / om;
    } else {
      r.rhs = E2 * E2 * H0 / (E2 + om * H0 / S2);
    }
    r.inputs = {{"H", H0}, {"S", S}, {"t", time}, {"H_t", Ht}};
  } else {
    throw std::invalid_argument("verify: unknown inequality kind '" + kind + "'");
  }

  finalize(r);
  return r;
}

std::vector<InequalityReport> verify_all(const Target& t, const VerifyOptions& opt) {
  std::vector<InequalityReport> out;
  out.reserve(inequality_kinds().size());
  for (const std::string& k : inequality_kinds()) out.push_back(verify(k, t, opt));
  return out;
}

// ---------------------------------------------------------------------------
// General-reference form

GeneralConstants general_constants(const Reference& ref, double c) {
  switch (ref.kind) {
    case RefKind::Gaussian:
      return {1.0, 1.0, 1.0};
    case RefKind::Gamma:
      return {0.5, 0.5, 0.5};
    case RefKind::Jacobi:
      return {1.0, 1.0, 0.5};
    case RefKind::LogConcave:
      return {c, 3.0 * c, 1.0};
  }
  return {};
}

namespace {

void check_general_params(const Reference& ref, double rho, double kappa, double sigma) {
  if (!(rho > 0.0) || !(kappa > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("general bound: constants rho, kappa, sigma must be positive");
  if (ref.kind == RefKind::Gamma && !(ref.shape >= 0.5))
    throw std::invalid_argument(
        "general bound: gamma reference requires shape p >= 1/2 in one dimension");
}

}  // namespace

InequalityReport verify_general_hsi(const Target& t, const Reference& ref, double rho,
                                    double kappa, double sigma, const QuadOptions& opt) {
  check_general_params(ref, rho, kappa, sigma);
  InequalityReport r;
  r.kind = "general_hsi";

  FunctionalValue fH = relative_entropy(t, ref, opt);
  FunctionalValue fI = fisher_information(t, ref, opt);
  FunctionalValue fS = stein_discrepancy(t, ref, 2.0, opt);
  if (fS.diverged && std::isnan(fS.value)) mark_indeterminate(r, "S unavailable: " + fS.note);
  const double H = fH.or_inf(), I = fI.or_inf(), S = fS.or_inf();
  const double S2 = S * S;

  r.lhs = H;
  if (S2 == 0.0) {
    r.convention = "S = 0 -> bound 0";
    r.rhs = 0.0;
  } else if (std::isinf(S2)) {
    // Continuity limit along the linear branch of Psi.
    r.convention = "S = inf -> linear branch max(rho,kappa) I/(2 rho kappa)";
    r.rhs = std::max(rho, kappa) * I / (2.0 * rho * kappa);
  } else if (std::isinf(I)) {
    r.convention = "I = inf -> bound inf";
    r.rhs = kInf;
  } else {
    const double arg = sigma * std::max(rho, kappa) * I / (rho * kappa * S2);
    r.rhs = S2 / (2.0 * sigma) * psi_fn(arg);
  }
  r.inputs = {{"H", H},     {"I", I},         {"S", S},
              {"rho", rho}, {"kappa", kappa}, {"sigma", sigma}};
  finalize(r);
  return r;
}

InequalityReport verify_w2s_general(const Target& t, const Reference& ref, double rho,
                                    double kappa, double sigma, const QuadOptions& opt) {
  check_general_params(ref, rho, kappa, sigma);
  InequalityReport r;
  r.kind = "w2s_general";

  FunctionalValue fW = wasserstein(t, ref, 2.0, opt);
  FunctionalValue fS = stein_discrepancy(t, ref, 2.0, opt);
  if (fS.diverged && std::isnan(fS.value)) mark_indeterminate(r, "S unavailable: " + fS.note);
  const double W2 = fW.or_inf(), S = fS.or_inf();
  r.lhs = W2;
  r.rhs = 2.0 / std::sqrt(kappa * sigma) * S;
  r.inputs = {{"W2", W2}, {"S", S}, {"rho", rho}, {"kappa", kappa}, {"sigma", sigma}};
  finalize(r);
  return r;
}

// ---------------------------------------------------------------------------
// Covariance-weighted form

InequalityReport verify_hsi_cov(const Target& t, double ref_variance, const QuadOptions& opt) {
  if (!(ref_variance > 0.0))
    throw std::invalid_argument("verify_hsi_cov: reference variance must be positive");
  InequalityReport r;
  r.kind = "hsi_cov";
  const double cvar = ref_variance;

  Reference refc = ref_gaussian(cvar);
  FunctionalValue fH = relative_entropy(t, refc, opt);
  FunctionalValue fI = fisher_information(t, refc, opt);
  // The kernel in the weighted bound is the one for the identity-covariance
  // integration-by-parts identity, rescaled by the reference variance inside
  // the norm.
  SteinKernel ker = stein_kernel(t, ref_gaussian(), opt);
  if (!ker.valid) {
    mark_indeterminate(r, "kernel invalid: " + ker.note);
    r.lhs = fH.or_inf();
    r.rhs = kNaN;
    finalize(r);
    return r;
  }

  auto f = [&](double x) { return sqr(ker(x) / cvar - 1.0) * t.density(x); };
  QuadResult s2q = integrate(f, std::max(ker.lo, t.eff_lo(15.0)),
                             std::min(ker.hi, t.eff_hi(15.0)), t.breakpoints, opt);
  const double St2 = s2q.value;

  const double H = fH.or_inf(), I = fI.or_inf();
  r.lhs = H;
  // Same limit conventions as the identity-covariance form, with the operator
  // norm of C multiplying the Fisher information.
  r.rhs = hsi_rhs(St2, cvar * I, &r.convention);
  r.inputs = {{"H", H}, {"I", I}, {"S_tilde2", St2}, {"cov", cvar}};
  finalize(r);
  return r;
}

InequalityReport verify_hsi_cov_gaussian(const std::vector<std::vector<double>>& cov_target,
                                         const std::vector<std::vector<double>>& cov_ref) {
  const int d = static_cast<int>(cov_target.size());
  if (d == 0 || static_cast<int>(cov_ref.size()) != d)
    throw std::invalid_argument("verify_hsi_cov_gaussian: dimension mismatch");
  Eigen::MatrixXd Ct(d, d), Cr(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(cov_target[i].size()) != d || static_cast<int>(cov_ref[i].size()) != d)
      throw std::invalid_argument("verify_hsi_cov_gaussian: matrices must be square");
    for (int j = 0; j < d; ++j) {
      Ct(i, j) = cov_target[i][j];
      Cr(i, j) = cov_ref[i][j];
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Cr);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("verify_hsi_cov_gaussian: reference covariance must be positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(Ct);
  if (et.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("verify_hsi_cov_gaussian: target covariance must be positive definite");

  const Eigen::MatrixXd Crinv = Cr.inverse();
  const Eigen::MatrixXd M = Crinv * Ct;

  InequalityReport r;
  r.kind = "hsi_cov";
  // Closed forms for a centered Gaussian target against a centered Gaussian
  // reference: entropy from the trace/log-det formula, score difference for
  // the Fisher information, and the constant kernel tau = C_target.
  r.lhs = 0.5 * (M.trace() - d - std::log(M.determinant()));

  const Eigen::MatrixXd Dm = Crinv - Ct.inverse();
  const double I = (Dm * Ct * Dm).trace();

  // Cr^{-1/2} via the spectral decomposition.
  Eigen::VectorXd inv_sqrt = es.eigenvalues().array().rsqrt();
  const Eigen::MatrixXd Rihalf =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd A =
      Rihalf * Ct * Rihalf - Eigen::MatrixXd::Identity(d, d);
  const double St2 = A.squaredNorm();
  const double op = es.eigenvalues().maxCoeff();

  r.rhs = hsi_rhs(St2, op * I, &r.convention);
  r.inputs = {{"H", r.lhs}, {"I", I}, {"S_tilde2", St2}, {"cov_op", op}};
  finalize(r);
  return r;
}

// ---------------------------------------------------------------------------
// Interpolated bound surface

double hwsi_phi_terms(double I, double S2, double W2, double alpha, double beta) {
  if (!(alpha > 0.0) || !(alpha <= beta) || !(beta <= 1.0))
    throw std::invalid_argument("hwsi_phi: need 0 < alpha <= beta <= 1");
  return 0.5 * (alpha * I + (alpha - std::log(alpha)) * S2 +
                (1.0 - beta) / beta * W2 * W2 + (std::log(beta) - beta) * S2);
}

namespace {

struct HwsiInputs {
  double I = 0.0, S2 = 0.0, W2 = 0.0;
};

HwsiInputs hwsi_inputs(const Target& t, const QuadOptions& opt) {
  Ctx c(t, opt);
  HwsiInputs in;
  in.I = c.I().or_inf();
  const double S = c.S().or_inf();
  in.S2 = S * S;
  in.W2 = c.W2().or_inf();
  if (std::isnan(in.I) || std::isinf(in.I) || std::isnan(in.S2) || std::isinf(in.S2) ||
      std::isnan(in.W2) || std::isinf(in.W2))
    throw std::domain_error("hwsi_phi: inputs must be finite");
  return in;
}

}  // namespace

double hwsi_phi(const Target& t, double alpha, double beta, const QuadOptions& opt) {
  HwsiInputs in = hwsi_inputs(t, opt);
  return hwsi_phi_terms(in.I, in.S2, in.W2, alpha, beta);
}

HwsiMin hwsi_phi_min(const Target& t, const QuadOptions& opt) {
  HwsiInputs in = hwsi_inputs(t, opt);

  HwsiMin best;
  best.value = kInf;
  auto consider = [&](double a, double b) {
    if (!(a > 0.0) || a > b || b > 1.0) return;
    const double v = hwsi_phi_terms(in.I, in.S2, in.W2, a, b);
    if (v < best.value) {
      best.value = v;
      best.alpha = a;
      best.beta = b;
    }
  };

  const int n = 400;
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j)
      consider(static_cast<double>(i) / n, static_cast<double>(j) / n);

  double h = 1.0 / n;
  for (int round = 0; round < 3; ++round) {
    const double a0 = best.alpha, b0 = best.beta;
    const int m = 20;
    const double step = 2.0 * h / m;  // refine to h/10 each round
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j) consider(a0 + i * step, b0 + j * step);
    h = step;
  }

  const double res = 2.0 * h;
  if (best.beta >= 1.0 - res)
    best.boundary = "beta=1";
  else if (best.beta - best.alpha <= res)
    best.boundary = "alpha=beta";
  else
    best.boundary = "interior";
  return best;
}

// ---------------------------------------------------------------------------
// Two-scale mixture sweep

std::vector<SweepRow> counterexample_sweep(const std::vector<double>& ns,
                                           const std::vector<double>& as,
                                           const QuadOptions& opt) {
  if (!as.empty() && as.size() != ns.size())
    throw std::invalid_argument("counterexample_sweep: length mismatch between n and a lists");
  std::vector<SweepRow> rows;
  rows.reserve(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double n = ns[i];
    const double a = as.empty() ? 1.0 / std::sqrt(n) : as[i];
    if (!(n >= 1.0)) throw std::invalid_argument("counterexample_sweep: n must be >= 1");
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("counterexample_sweep: weight a must lie in [0, 1]");

    Target t = target_mixture(n, a);
    Ctx c(t, opt);
    SweepRow row;
    row.n = n;
    row.a = a;
    row.H = c.H().or_inf();
    row.I = c.I().or_inf();
    const double S = c.S().or_inf();
    row.S2 = S * S;
    row.W2 = c.W2().or_inf();
    row.hsi_rhs = hsi_rhs(row.S2, row.I);
    row.hwi_rhs = std::isinf(row.I) ? kInf : row.W2 * std::sqrt(row.I) - 0.5 * row.W2 * row.W2;
    row.hsi_holds = row.H <= row.hsi_rhs + verify_tolerance(row.hsi_rhs);
    row.hwi_holds = row.H <= row.hwi_rhs + verify_tolerance(row.hwi_rhs);
    const double budget = a * std::log1p(n * n);
    row.hsi_budget_ok = row.hsi_rhs <= budget + verify_tolerance(budget);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace steinlab
