#include "steinlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steinlab/special.hpp"

namespace steinlab {

namespace {

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
  return d;
}

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

double target_peak(const Target& t) {
  const double s = std::max(t.scale, 1e-6);
  double peak = 0.0;
  for (int k = -8; k <= 8; ++k)
    peak = std::max(peak, t.density(t.center_hint + 0.25 * s * k));
  return peak;
}

// Integral of f against Lebesgue measure over the target's effective range
// intersected with [lo_clip, hi_clip], then extended outward by doubling
// until the added shells are negligible. `unstable` is set when the shells
// keep contributing after many doublings (tail-divergent integrand).
struct TailIntegral {
  double value = 0.0;
  double error = 0.0;
  bool unstable = false;
};

TailIntegral integrate_with_tails(const Fn1& f, const Target& t, double lo_clip,
                                  double hi_clip, const QuadOptions& opt) {
  auto [elo, ehi] = effective_support(t);
  double a = std::max(elo, lo_clip);
  double b = std::min(ehi, hi_clip);
  std::vector<double> breaks = t.breakpoints;
  // A narrow feature next to a marked break can hide entirely between the
  // nodes of a wide panel that merely touches the break at its edge; bracket
  // each break at the feature scale so a panel boundary lands inside it.
  if (t.spike_width > 0.0) {
    const std::size_t nb = t.breakpoints.size();
    for (std::size_t i = 0; i < nb; ++i) {
      for (double m : {1.0, 5.0}) {
        breaks.push_back(t.breakpoints[i] - m * t.spike_width);
        breaks.push_back(t.breakpoints[i] + m * t.spike_width);
      }
    }
  }
  const double cl = std::max(a, t.eff_lo(15.0));
  const double ch = std::min(b, t.eff_hi(15.0));
  if (cl > a) breaks.push_back(cl);
  if (ch < b) breaks.push_back(ch);
  QuadResult res = integrate(f, a, b, breaks, opt);

  TailIntegral out;
  out.value = res.value;
  out.error = res.error;
  const double c = 0.5 * (cl + ch);
  double shell_last = 0.0;
  int k = 0;
  for (; k < 18; ++k) {
    const double na = std::max(lo_clip, c - 2.0 * (c - a));
    const double nb = std::min(hi_clip, c + 2.0 * (b - c));
    if (na == a && nb == b) break;
    double shell = 0.0;
    if (na < a) {
      QuadResult r = integrate(f, na, a, {}, opt);
      shell += r.value;
      out.error += r.error;
    }
    if (nb > b) {
      QuadResult r = integrate(f, b, nb, {}, opt);
      shell += r.value;
      out.error += r.error;
    }
    out.value += shell;
    shell_last = shell;
    a = na;
    b = nb;
    if (std::fabs(shell) <= 1e-10 * std::max(1.0, std::fabs(out.value))) break;
  }
  if (k == 18 && std::fabs(shell_last) > 1e-8 * std::max(1.0, std::fabs(out.value)))
    out.unstable = true;
  return out;
}

// Absolute moment int |x|^p dnu with the same tail-stability bookkeeping.
TailIntegral abs_moment(const Target& t, double p, const QuadOptions& opt) {
  auto f = [&t, p](double x) { return std::pow(std::fabs(x), p) * t.density(x); };
  return integrate_with_tails(f, t, t.lo, t.hi, opt);
}

}  // namespace

// ---------------------------------------------------------------------------
// Kernel construction

SteinKernel stein_kernel(const Target& t, const Reference& ref, const QuadOptions& opt) {
  (void)opt;
  SteinKernel k;
  const double s = std::max(t.scale, 1e-6);
  const double delta = 1e-10 * std::max(1.0, s);
  const double peak = target_peak(t);
  const double floor = std::max(1e-300, 1e-280 * peak);

  // Grid range: the tail integral must reach far enough out that the kernel
  // is exact wherever the target still carries weight for quartic-type
  // integrands; extend geometrically while the density stays meaningful.
  auto push = [&](double dir) {
    double off = 15.0 * s;
    const double end = dir < 0.0 ? t.lo : t.hi;
    while (off < 1e6 * s) {
      const double x = t.center_hint + dir * off;
      if (dir < 0.0 ? x <= end : x >= end) break;
      if (t.density(x) < floor) break;
      off *= 1.1;
    }
    return t.center_hint + dir * off;
  };
  const double klo = std::max(t.lo + delta, push(-1.0));
  const double khi = std::min(t.hi - delta, push(1.0));

  auto grid = graded_grid(klo, khi, t.breakpoints, t.spike_width, 2048,
                          std::max(klo, t.eff_lo(15.0)), std::min(khi, t.eff_hi(15.0)));
  const std::size_t n = grid.size();
  std::vector<double> gl_x, gl_w;
  gauss_legendre(7, gl_x, gl_w);

  // Per-cell integrals of (-b) rho. The tail integral T(x) = int_x^hi (-b) rho
  // is accumulated backward from the right end for nodes right of the drift's
  // zero and as -int_lo^x (forward, using the mean condition) left of it, so
  // each one-sided sum has a fixed sign and no catastrophic cancellation where
  // the density underflows.
  std::vector<double> cell(n - 1, 0.0);
  double babs = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = grid[i], b = grid[i + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double cv = 0.0, cabs = 0.0;
    for (std::size_t j = 0; j < gl_x.size(); ++j) {
      const double x = c + h * gl_x[j];
      const double bd = ref.b(x) * t.density(x);
      cv -= gl_w[j] * bd;
      cabs += gl_w[j] * std::fabs(bd);
    }
    cell[i] = cv * h;
    babs += cabs * h;
  }
  std::vector<double> Tb(n, 0.0), Tf(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) Tb[i] = Tb[i + 1] + cell[i];
  for (std::size_t i = 0; i + 1 < n; ++i) Tf[i + 1] = Tf[i] + cell[i];
  const double total = Tb[0];
  const double mid = std::min(std::max(ref.mean(), klo), khi);

  std::vector<double> tau(n), slope(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = t.density(grid[i]);
    const double T = grid[i] <= mid ? -Tf[i] : Tb[i];
    if (rho > 1e-300) {
      tau[i] = T / rho;
      const double dl = t.density_prime(grid[i]) / rho;
      slope[i] = ref.b(grid[i]) - tau[i] * dl;
    } else {
      tau[i] = 0.0;
      slope[i] = 0.0;
    }
    if (!std::isfinite(tau[i]) || !std::isfinite(slope[i])) {
      tau[i] = 0.0;
      slope[i] = 0.0;
    }
  }

  k.interp = CubicHermite(std::move(grid), std::move(tau), std::move(slope));
  k.lo = klo;
  k.hi = khi;
  k.provenance = KernelProvenance::ClosedForm1d;
  if (std::fabs(total) > 1e-6 * std::max(babs, 1e-12)) {
    k.valid = false;
    k.note = "drift-mean condition violated: int b dnu = " + format_g12(-total);
  }
  return k;
}

PearsonKernel stein_kernel_pearson(const PearsonParams& prm) {
  PearsonKernel k;
  const double s = prm.a1 - 2.0 * prm.b2;
  if (!(s > 0.0)) {
    k.note = "requires a1 - 2 b2 > 0";
    return k;
  }
  if (std::fabs(prm.a0 - prm.b1) > 1e-9 * (1.0 + std::fabs(prm.b1))) {
    k.note = "mean condition a0 = b1 violated";
    return k;
  }
  k.c0 = prm.b0 / s;
  k.c1 = prm.b1 / s;
  k.c2 = prm.b2 / s;
  k.valid = true;
  const double mag = 1.0 + std::fabs(k.c0) + std::fabs(k.c1) + std::fabs(k.c2);
  k.explodes_lo = !std::isfinite(prm.lo) || std::fabs(k(prm.lo)) < 1e-12 * mag;
  k.explodes_hi = !std::isfinite(prm.hi) || std::fabs(k(prm.hi)) < 1e-12 * mag;
  return k;
}

// ---------------------------------------------------------------------------
// Entropy

FunctionalValue relative_entropy(const Target& t, const Reference& ref,
                                 const QuadOptions& opt) {
  FunctionalValue fv;
  fv.kind = "H";

  double leak = 0.0;
  if (t.lo < ref.lo - 1e-12 * (1.0 + std::fabs(ref.lo))) leak += t.cdf(ref.lo);
  if (t.hi > ref.hi + 1e-12 * (1.0 + std::fabs(ref.hi))) leak += 1.0 - t.cdf(ref.hi);
  if (leak > 1e-13) {
    fv.diverged = true;
    fv.value = kInf;
    fv.note = "target mass " + format_g12(leak) + " outside the reference support";
    return fv;
  }

  auto f = [&](double x) {
    const double r = t.density(x);
    const double w = ref.density(x);
    if (r <= 1e-300) return w;
    return r * (std::log(r) - ref.log_density(x)) - r + w;
  };
  const double lo_clip = std::max(t.lo, ref.lo);
  const double hi_clip = std::min(t.hi, ref.hi);
  TailIntegral ti = integrate_with_tails(f, t, lo_clip, hi_clip, opt);
  if (ti.unstable) {
    fv.diverged = true;
    fv.value = kInf;
    fv.note = "entropy integral grows without bound in the tails";
    return fv;
  }

  // Reference mass never reached by the truncated integral: there the
  // integrand reduces to the reference density.
  auto [elo, ehi] = effective_support(t);
  const double a = std::max(elo, lo_clip), b = std::min(ehi, hi_clip);
  const double complement = ref.cdf(a) + (1.0 - ref.cdf(b));
  fv.value = std::max(0.0, ti.value + complement);
  fv.error = ti.error;
  return fv;
}

// ---------------------------------------------------------------------------
// Fisher information

FunctionalValue fisher_information(const Target& t, const Reference& ref,
                                   const QuadOptions& opt) {
  FunctionalValue fv;
  fv.kind = "I";

  // A positive density jump at a target-support endpoint interior to the
  // reference support forces the relative score out of L^2.
  const double peak = target_peak(t);
  const double jump_thr = 1e-6 * std::max(1.0, peak);
  for (double e : {t.lo, t.hi}) {
    if (!std::isfinite(e)) continue;
    const double margin = 1e-9 * (1.0 + std::fabs(e));
    if (e < ref.lo + margin || e > ref.hi - margin) continue;
    const double inward = (e == t.lo ? 1.0 : -1.0) * 1e-9 * std::max(1.0, t.scale);
    if (t.density(e + inward) > jump_thr) {
      fv.diverged = true;
      fv.value = kInf;
      fv.note = "density jump at support endpoint " + format_g12(e);
      return fv;
    }
  }

  const double lo_clip = std::max(t.lo, ref.lo);
  const double hi_clip = std::min(t.hi, ref.hi);
  auto ieps = [&](double eps) -> TailIntegral {
    auto f = [&, eps](double x) {
      const double r = t.density(x);
      const double w = ref.density(x);
      const double num = t.density_prime(x) - r * ref.dlog_density(x);
      const double den = r + eps * w;
      if (den <= 1e-300) return 0.0;
      return ref.a(x) * num * num / den;
    };
    return integrate_with_tails(f, t, lo_clip, hi_clip, opt);
  };

  TailIntegral i4 = ieps(1e-4);
  TailIntegral i6 = ieps(1e-6);
  TailIntegral i8 = ieps(1e-8);
  fv.value = i8.value;
  fv.error = std::fabs(i8.value - i6.value);

  if (i4.unstable || i6.unstable || i8.unstable) {
    fv.diverged = true;
    fv.value = kInf;
    fv.note = "score integral grows without bound in the tails";
    return fv;
  }
  if (i8.value > 1e8) {
    fv.diverged = true;
    fv.value = kInf;
    fv.note = "regularized values exceed 1e8";
    return fv;
  }
  const double d86 = std::fabs(i8.value - i6.value);
  const double d64 = std::fabs(i6.value - i4.value);
  if (d86 >= d64 && d86 > 1e-6 * std::max(1.0, std::fabs(i8.value))) {
    fv.diverged = true;
    fv.value = kInf;
    fv.note = "regularized values do not contract (" + format_g12(d64) + " -> " +
              format_g12(d86) + ")";
    return fv;
  }
  return fv;
}

// ---------------------------------------------------------------------------
// Stein discrepancy

FunctionalValue stein_discrepancy(const Target& t, const Reference& ref,
                                  const SteinKernel& kernel, double p,
                                  const QuadOptions& opt) {
  FunctionalValue fv;
  fv.kind = "S";
  if (!kernel.valid) {
    fv.diverged = true;
    fv.value = kNaN;
    fv.note = "kernel invalid: " + kernel.note;
    return fv;
  }
  auto f = [&](double x) {
    const double a = ref.a(x);
    if (a == 0.0) return 0.0;
    return std::pow(std::fabs(kernel(x) / a - 1.0), p) * t.density(x);
  };
  const double lo_clip = std::max(kernel.lo, ref.lo);
  const double hi_clip = std::min(kernel.hi, ref.hi);
  TailIntegral full = integrate_with_tails(f, t, lo_clip, hi_clip, opt);
  if (full.unstable) {
    fv.diverged = true;
    fv.value = kInf;
    fv.note = "discrepancy integral grows without bound in the tails";
    return fv;
  }

  // Shrink the unbounded sides by 30%: if that moves the integral, the mass
  // lives in the far tails and the honest value is infinite.
  const double c = 0.5 * (t.eff_lo(15.0) + t.eff_hi(15.0));
  auto [elo, ehi] = effective_support(t);
  double sa = std::max(elo, lo_clip), sb = std::min(ehi, hi_clip);
  bool shrunk = false;
  if (!std::isfinite(t.lo)) {
    sa = c - 0.7 * (c - sa);
    shrunk = true;
  }
  if (!std::isfinite(t.hi)) {
    sb = c + 0.7 * (sb - c);
    shrunk = true;
  }
  if (shrunk) {
    std::vector<double> ibreaks = t.breakpoints;
    for (double e : {t.eff_lo(15.0), t.eff_hi(15.0)})
      if (e > sa && e < sb) ibreaks.push_back(e);
    QuadResult inner = integrate(f, sa, sb, ibreaks, opt);
    if (std::fabs(full.value - inner.value) > 1e-3 * std::max(1e-12, full.value)) {
      fv.diverged = true;
      fv.value = kInf;
      fv.note = "discrepancy integral dominated by the far tails";
      return fv;
    }
  }

  fv.value = std::pow(std::max(0.0, full.value), 1.0 / p);
  if (full.value > 0.0)
    fv.error = full.error / p * std::pow(full.value, 1.0 / p - 1.0);
  return fv;
}

FunctionalValue stein_discrepancy(const Target& t, const Reference& ref, double p,
                                  const QuadOptions& opt) {
  SteinKernel k = stein_kernel(t, ref, opt);
  return stein_discrepancy(t, ref, k, p, opt);
}

Decomposition discrepancy_decomposition(const Target& t, const SteinKernel& kernel,
                                        const QuadOptions& opt) {
  // Against the standard Gaussian reference (a = 1):
  //   S^2 = Var(tau) + (E tau - 1)^2, with E tau = E x^2 by the identity.
  auto m = [&](int pow2) {
    auto f = [&](double x) {
      const double v = kernel(x);
      return (pow2 == 1 ? v : v * v) * t.density(x);
    };
    return integrate_with_tails(f, t, kernel.lo, kernel.hi, opt).value;
  };
  const double e1 = m(1), e2 = m(2);
  Decomposition d;
  d.variance_part = std::max(0.0, e2 - e1 * e1);
  d.covariance_part = sqr(e1 - 1.0);
  return d;
}

// ---------------------------------------------------------------------------
// Transport distances

namespace {

FunctionalValue wasserstein_by_quantiles(
    const std::function<double(double)>& q1, const std::function<double(double)>& f2,
    const std::function<double(double)>& rho2, double ylo, double yhi,
    const std::vector<double>& breaks, double p, const QuadOptions& opt) {
  FunctionalValue fv;
  fv.kind = "W";
  auto f = [&](double y) {
    const double g = q1(f2(y));
    return std::pow(std::fabs(g - y), p) * rho2(y);
  };
  QuadResult res = integrate(f, ylo, yhi, breaks, opt);
  fv.value = std::pow(std::max(0.0, res.value), 1.0 / p);
  if (res.value > 0.0) fv.error = res.error / p * std::pow(res.value, 1.0 / p - 1.0);
  return fv;
}

bool moment_diverges(const Target& t, double p, const QuadOptions& opt) {
  return abs_moment(t, std::max(1.0, p), opt).unstable;
}

}  // namespace

FunctionalValue wasserstein(const Target& t, const Reference& ref, double p,
                            const QuadOptions& opt) {
  if (!(p >= 1.0)) throw std::invalid_argument("wasserstein: p must be >= 1");
  if (moment_diverges(t, p, opt)) {
    FunctionalValue fv;
    fv.kind = "W";
    fv.diverged = true;
    fv.value = kInf;
    fv.note = "target |x|^p moment diverges";
    return fv;
  }
  const double ylo = ref.quantile(1e-14), yhi = ref.quantile(1.0 - 1e-14);
  std::vector<double> anchors;
  for (double u : {0.1, 0.3, 0.5, 0.7, 0.9}) anchors.push_back(ref.quantile(u));
  auto fv = wasserstein_by_quantiles(
      [&](double u) { return t.quantile(u); }, [&](double y) { return ref.cdf(y); },
      [&](double y) { return ref.density(y); }, ylo, yhi, anchors, p, opt);
  return fv;
}

FunctionalValue wasserstein(const Target& t1, const Target& t2, double p,
                            const QuadOptions& opt) {
  if (!(p >= 1.0)) throw std::invalid_argument("wasserstein: p must be >= 1");
  FunctionalValue fv;
  fv.kind = "W";
  if (moment_diverges(t1, p, opt) || moment_diverges(t2, p, opt)) {
    fv.diverged = true;
    fv.value = kInf;
    fv.note = "|x|^p moment diverges";
    return fv;
  }
  auto [ylo, yhi] = effective_support(t2);
  std::vector<double> anchors = t2.breakpoints;
  for (double u : {0.1, 0.3, 0.5, 0.7, 0.9}) anchors.push_back(t2.quantile(u));
  return wasserstein_by_quantiles(
      [&](double u) { return t1.quantile(u); }, [&](double y) { return t2.cdf(y); },
      [&](double y) { return t2.density(y); }, ylo, yhi, anchors, p, opt);
}

FunctionalValue total_variation(const Target& t, const Reference& ref,
                                const QuadOptions& opt) {
  FunctionalValue fv;
  fv.kind = "TV";
  auto [elo, ehi] = effective_support(t);
  const double a = std::min(elo, ref.quantile(1e-14));
  const double b = std::max(ehi, ref.quantile(1.0 - 1e-14));
  std::vector<double> breaks = t.breakpoints;
  for (double e : {t.lo, t.hi, ref.lo, ref.hi, t.eff_lo(15.0), t.eff_hi(15.0),
                   ref.quantile(0.25), ref.quantile(0.75)})
    if (std::isfinite(e) && e > a && e < b) breaks.push_back(e);
  auto f = [&](double x) { return std::fabs(t.density(x) - ref.density(x)); };
  QuadResult res = integrate(f, a, b, breaks, opt);
  fv.value = 0.5 * res.value;
  fv.error = 0.5 * res.error;
  return fv;
}

double target_moment(const Target& t, int k, const QuadOptions& opt) {
  auto f = [&t, k](double x) {
    double v = t.density(x);
    for (int i = 0; i < k; ++i) v *= x;
    return v;
  };
  TailIntegral ti = integrate_with_tails(f, t, t.lo, t.hi, opt);
  if (ti.unstable) return k % 2 == 0 ? kInf : kNaN;
  return ti.value;
}

double stein_identity_residual(const Target& t, const Reference& ref,
                               const SteinKernel& kernel,
                               const std::vector<double>& phi_coeffs,
                               const QuadOptions& opt) {
  const std::vector<double> d1 = poly_derivative(phi_coeffs);
  const std::vector<double> d2 = poly_derivative(d1);
  auto f = [&](double x) {
    return (-ref.b(x) * poly_eval(d1, x) - kernel(x) * poly_eval(d2, x)) * t.density(x);
  };
  return integrate_with_tails(f, t, kernel.lo, kernel.hi, opt).value;
}

}  // namespace steinlab
