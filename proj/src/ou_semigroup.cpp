#include "steinlab/ou_semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steinlab/interp.hpp"
#include "steinlab/quadrature.hpp"
#include "steinlab/special.hpp"

namespace steinlab {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727418;
constexpr double kPiLocal = 3.14159265358979323846;

// Three-point derivative on a nonuniform grid, exact for quadratics.
std::vector<double> central_slopes(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (y[1] - y[0]) / (x[1] - x[0]);
  d[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
    d[i] = (-hp / (hm * (hm + hp))) * y[i - 1] + ((hp - hm) / (hm * hp)) * y[i] +
           (hm / (hp * (hm + hp))) * y[i + 1];
  }
  return d;
}

}  // namespace

struct Evolved::Impl {
  Target base;
  QuadOptions opt;
  double t = 0.0;
  double e = 1.0;   // e^{-t}
  double s = 0.0;   // sqrt(1 - e^{-2t})
  double em1 = 0.0; // expm1(-t), for the cancellation-free u - x
  bool degenerate = false;
  bool use_adaptive = false;
  double ulo = 0.0, uhi = 0.0;  // clipped base integration window

  // Gauss-Hermite rule rescaled to the standard normal weight.
  std::vector<double> gx, gw;

  // Lazily built base kernel and tables of the evolved quantities.
  mutable bool have_kernel = false;
  mutable SteinKernel kernel;
  mutable std::vector<double> grid_, rho_;      // nodes and nodal density
  mutable CubicHermite logr_;                   // log density, exact slopes
  mutable bool have_density = false;
  mutable CubicHermite taut_;                   // evolved kernel
  mutable bool have_tau = false;
  mutable double glo = 0.0, ghi = 0.0;
  mutable std::shared_ptr<Target> evolved_target;

  void ensure_kernel() const {
    if (have_kernel) return;
    kernel = stein_kernel(base, ref_gaussian(), opt);
    have_kernel = true;
  }

  // Mehler integrals at one point. Writes the evolved density, its
  // x-derivative, and (optionally) the kernel numerator int rho tau G du,
  // where G(u) = phi_s(x - e u) is the transition density.
  void point(double x, bool want_tau, double* rho, double* drho,
             double* taunum) const {
    if (want_tau) ensure_kernel();
    if (use_adaptive) {
      const double sig = s / e;                    // G width in the u variable
      const double uc = x / e;                     // G center
      double a = std::max(ulo, uc - 39.0 * sig);
      double b = std::min(uhi, uc + 39.0 * sig);
      if (!(a < b)) {
        *rho = 0.0;
        *drho = 0.0;
        if (taunum) *taunum = 0.0;
        return;
      }
      std::vector<double> anchors;
      for (double bp : base.breakpoints)
        if (bp > a && bp < b) anchors.push_back(bp);
      for (double k : {-10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0}) {
        const double u = uc + k * sig;
        if (u > a && u < b) anchors.push_back(u);
      }
      QuadOptions inner = opt;
      inner.rel_tol = std::max(opt.rel_tol, 1e-10);
      const double inv2s2 = 1.0 / (2.0 * s * s);
      const double norm = 1.0 / (s * std::sqrt(2.0 * kPiLocal));
      auto G = [&](double u) {
        const double z = x - e * u;
        return norm * std::exp(-z * z * inv2s2);
      };
      *rho = integrate([&](double u) { return base.density(u) * G(u); }, a, b,
                       anchors, inner)
                 .value;
      *drho = integrate(
                  [&](double u) {
                    return base.density(u) * (e * u - x) * inv2s2 * 2.0 * G(u);
                  },
                  a, b, anchors, inner)
                  .value;
      if (taunum)
        *taunum = integrate(
                      [&](double u) { return base.density(u) * kernel(u) * G(u); },
                      a, b, anchors, inner)
                      .value;
      return;
    }
    // Smooth full-support path: fixed Gauss-Hermite in the Mehler variable.
    // Each term is rho(u_i) e^{u_i^2/2 - x^2/2}, assembled so that u_i - x is
    // free of cancellation for small t.
    double r = 0.0, dr = 0.0, tn = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double du = em1 * x + s * gx[i];
      const double u = x + du;
      const double rho_u = base.density(u);
      if (rho_u <= 0.0) continue;
      const double w = gw[i] * std::exp(0.5 * du * (u + x));
      r += w * rho_u;
      dr += w * (base.density_prime(u) * e + rho_u * (e * u - x));
      if (taunum) tn += w * rho_u * kernel(u);
    }
    *rho = r;
    *drho = dr;
    if (taunum) *taunum = tn;
  }

  std::vector<double> make_grid() const {
    auto [blo, bhi] = effective_support(base);
    const double sigt = std::sqrt(sqr(e * base.scale) + s * s);
    const double cm = e * base.center_hint;
    double clo = std::min(e * blo - 12.0 * s, -9.0);
    double chi = std::max(e * bhi + 12.0 * s, 9.0);
    double core_lo = std::max(clo, cm - 15.0 * sigt);
    double core_hi = std::min(chi, cm + 15.0 * sigt);
    std::vector<double> breaks;
    for (double bp : base.breakpoints) breaks.push_back(e * bp);
    for (double bp : {base.lo, base.hi})
      if (std::isfinite(bp)) breaks.push_back(e * bp);
    const double sw = std::max(e * base.spike_width, 30.0 * s);
    return graded_grid(clo, chi, breaks, breaks.empty() ? 0.0 : sw, 1536,
                       core_lo, core_hi);
  }

  void ensure_density() const {
    if (have_density) return;
    if (grid_.empty()) grid_ = make_grid();
    const std::size_t n = grid_.size();
    std::vector<double> rho(n), slope(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r, dr;
      point(grid_[i], false, &r, &dr, nullptr);
      rho[i] = r;
      slope[i] = dr;
      peak = std::max(peak, r);
    }
    // Trim to the contiguous window where the density is representable.
    const double floor = std::max(1e-300, 1e-260 * peak);
    std::size_t i0 = 0, i1 = n - 1;
    while (i0 < i1 && rho[i0] < floor) ++i0;
    while (i1 > i0 && rho[i1] < floor) --i1;
    if (i1 - i0 < 8) throw std::runtime_error("ou: evolved density underflows");
    std::vector<double> xs(grid_.begin() + i0, grid_.begin() + i1 + 1);
    std::vector<double> L(i1 - i0 + 1), D(i1 - i0 + 1), R(i1 - i0 + 1);
    for (std::size_t i = 0; i <= i1 - i0; ++i) {
      R[i] = rho[i0 + i];
      L[i] = std::log(R[i]);
      D[i] = slope[i0 + i] / R[i];
    }
    glo = xs.front();
    ghi = xs.back();
    grid_ = xs;
    rho_ = R;
    logr_ = CubicHermite(std::move(xs), std::move(L), std::move(D));
    have_density = true;
  }

  void ensure_tau() const {
    if (have_tau) return;
    ensure_density();
    ensure_kernel();
    const std::size_t n = grid_.size();
    std::vector<double> tv(n);
    for (std::size_t i = 0; i < n; ++i) {
      double r, dr, tn;
      point(grid_[i], true, &r, &dr, &tn);
      tv[i] = e * e * tn / rho_[i] + s * s;
      if (!std::isfinite(tv[i])) tv[i] = s * s;
    }
    std::vector<double> xs = grid_;
    std::vector<double> d = central_slopes(xs, tv);
    taut_ = CubicHermite(std::move(xs), std::move(tv), std::move(d));
    have_tau = true;
  }

  Target make_target() const {
    if (degenerate) return base;
    ensure_density();
    auto L = std::make_shared<CubicHermite>(logr_);
    Target tg;
    tg.name = base.name + ":ou";
    tg.pdf = [L](double x) { return std::exp((*L)(x)); };
    tg.dpdf = [L](double x) { return std::exp((*L)(x)) * L->prime(x); };
    tg.scale = std::sqrt(sqr(e * base.scale) + s * s);
    tg.center_hint = e * base.center_hint;
    // The evolved density is smooth, but the images of the base's edges and
    // spike marks are still where its structure lives; keep them as anchors
    // so downstream quadrature lands panels on them.
    for (double bp : base.breakpoints) tg.breakpoints.push_back(e * bp);
    for (double bp : {base.lo, base.hi})
      if (std::isfinite(bp)) tg.breakpoints.push_back(e * bp);
    if (!tg.breakpoints.empty())
      tg.spike_width = std::max(e * base.spike_width, 3.0 * s);
    auto b = std::make_shared<Target>(base);
    const double ee = e, ss = s;
    tg.sampler_fn = [b, ee, ss](Rng& rng) {
      return ee * b->sample(rng) + ss * rng.normal();
    };
    return tg;
  }

  const Target& target() const {
    if (!evolved_target) evolved_target = std::make_shared<Target>(make_target());
    return *evolved_target;
  }
};

Evolved::Evolved(const Target& base, double t, const QuadOptions& opt)
    : base_(base), t_(t) {
  if (!(t >= 0.0)) throw std::invalid_argument("Evolved: time must be >= 0");
  impl_ = std::make_shared<Impl>();
  impl_->base = base;
  impl_->opt = opt;
  impl_->t = t;
  impl_->e = std::exp(-t);
  impl_->em1 = std::expm1(-t);
  impl_->s = std::sqrt(std::max(0.0, -std::expm1(-2.0 * t)));
  impl_->degenerate = impl_->s < 1e-9;
  impl_->use_adaptive =
      std::isfinite(base.lo) || std::isfinite(base.hi) || !base.breakpoints.empty();
  if (impl_->use_adaptive) {
    // The inner integrals must see the base density down to the underflow
    // floor, not just the bulk: a clipped window near the clip edge yields
    // half-covered transition kernels and garbage log-slopes.
    auto [blo, bhi] = effective_support(base);
    double peak = 0.0;
    for (int k = -8; k <= 8; ++k)
      peak = std::max(peak,
                      base.density(base.center_hint + 0.25 * k * base.scale));
    const double floor = std::max(1e-300, 1e-280 * peak);
    const double c = base.center_hint;
    const double cap = 1e6 * std::max(base.scale, 1e-6);
    double L = std::min(blo, c - base.scale), R = std::max(bhi, c + base.scale);
    while (R - c < cap && base.density(R) >= floor) R = c + 1.1 * (R - c);
    while (c - L < cap && base.density(L) >= floor) L = c - 1.1 * (c - L);
    impl_->ulo = std::max(base.lo, L);
    impl_->uhi = std::min(base.hi, R);
  }
  const int n = opt.gh_nodes > 0 ? opt.gh_nodes : 128;
  const auto& hx = gauss_hermite_nodes(n);
  const auto& hw = gauss_hermite_weights(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPiLocal);
  impl_->gx.resize(hx.size());
  impl_->gw.resize(hx.size());
  for (std::size_t i = 0; i < hx.size(); ++i) {
    impl_->gx[i] = std::sqrt(2.0) * hx[i];
    impl_->gw[i] = hw[i] * inv_sqrt_pi;
  }
}

double Evolved::density(double x) const {
  if (impl_->degenerate) return base_.density(x);
  double r, dr;
  impl_->point(x, false, &r, &dr, nullptr);
  return r;
}

double Evolved::h(double x) const {
  if (impl_->degenerate) {
    const double r = base_.density(x);
    return r <= 0.0 ? 0.0 : std::exp(std::log(r) + 0.5 * x * x + kHalfLog2Pi);
  }
  double r, dr;
  impl_->point(x, false, &r, &dr, nullptr);
  if (r <= 0.0) return 0.0;
  return std::exp(std::log(r) + 0.5 * x * x + kHalfLog2Pi);
}

double Evolved::h_prime(double x) const {
  double r, dr;
  if (impl_->degenerate) {
    r = base_.density(x);
    dr = base_.density_prime(x);
  } else {
    impl_->point(x, false, &r, &dr, nullptr);
  }
  return (dr + x * r) * std::exp(0.5 * x * x + kHalfLog2Pi);
}

double Evolved::tau(double x) const {
  if (impl_->degenerate) {
    impl_->ensure_kernel();
    return impl_->kernel(x);
  }
  double r, dr, tn;
  impl_->point(x, true, &r, &dr, &tn);
  if (!(r > 0.0)) return impl_->s * impl_->s;
  return impl_->e * impl_->e * tn / r + impl_->s * impl_->s;
}

Target Evolved::as_target() const { return impl_->target(); }

FunctionalValue Evolved::entropy() const {
  return relative_entropy(impl_->target(), ref_gaussian(), impl_->opt);
}

FunctionalValue Evolved::fisher() const {
  return fisher_information(impl_->target(), ref_gaussian(), impl_->opt);
}

FunctionalValue Evolved::discrepancy() const {
  if (impl_->degenerate) {
    impl_->ensure_kernel();
    return stein_discrepancy(base_, ref_gaussian(), impl_->kernel, 2.0, impl_->opt);
  }
  impl_->ensure_tau();
  impl_->ensure_kernel();
  SteinKernel k;
  k.interp = impl_->taut_;
  k.lo = impl_->glo;
  k.hi = impl_->ghi;
  k.valid = impl_->kernel.valid;
  k.note = impl_->kernel.note;
  k.provenance = KernelProvenance::Evolved;
  return stein_discrepancy(impl_->target(), ref_gaussian(), k, 2.0, impl_->opt);
}

double mehler_apply(const std::function<double(double)>& f, double t, double x,
                    int gh_nodes) {
  if (!(t >= 0.0)) throw std::invalid_argument("mehler_apply: time must be >= 0");
  const double e = std::exp(-t);
  const double s = std::sqrt(std::max(0.0, -std::expm1(-2.0 * t)));
  if (s < 1e-12) return f(x);
  const int n = gh_nodes > 0 ? gh_nodes : default_quad_options().gh_nodes;
  const auto& hx = gauss_hermite_nodes(n);
  const auto& hw = gauss_hermite_weights(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPiLocal);
  double acc = 0.0;
  for (std::size_t i = 0; i < hx.size(); ++i)
    acc += hw[i] * inv_sqrt_pi * f(e * x + s * std::sqrt(2.0) * hx[i]);
  return acc;
}

namespace {

// Decay bounds from the initial values, with explicit infinite-input limits.
void fill_bounds(DecayRow& r, double H0, double I0, double S2) {
  const double tt = r.t;
  const double E2 = std::exp(-2.0 * tt);
  const double E4 = E2 * E2;
  const double om = -std::expm1(-2.0 * tt);  // 1 - e^{-2t}
  r.bound_I_lsi = E2 * I0;
  r.bound_I_stein = om > 0.0 ? E4 * S2 / om : kInf;
  if (!std::isfinite(I0)) {
    r.bound_I_improved = om > 0.0 ? E4 * S2 / om : kInf;
  } else if (!std::isfinite(S2)) {
    r.bound_I_improved = E2 * I0;
  } else {
    const double den = S2 + (std::exp(2.0 * tt) - 1.0) * I0;
    r.bound_I_improved = den > 0.0 ? E2 * S2 * I0 / den : E2 * I0;
  }
  r.bound_H_exp = E2 * H0;
  if (!std::isfinite(S2)) {
    r.bound_H_hsi1 = E2 * H0;
  } else if (!std::isfinite(H0)) {
    r.bound_H_hsi1 = om > 0.0 ? E4 * S2 / om : kInf;
  } else {
    const double den = E2 + om * (S2 > 0.0 ? H0 / S2 : 0.0);
    r.bound_H_hsi1 = den > 0.0 ? E4 * H0 / den : kInf;
  }
  r.bound_H_hsi2 = om > 0.0 ? E4 * S2 / om : kInf;
}

}  // namespace

std::vector<DecayRow> decay_curves(const Target& t, const std::vector<double>& times,
                                   const QuadOptions& opt) {
  const Reference g = ref_gaussian();
  const double H0 = relative_entropy(t, g, opt).or_inf();
  const double I0 = fisher_information(t, g, opt).or_inf();
  SteinKernel k = stein_kernel(t, g, opt);
  const double S0 = stein_discrepancy(t, g, k, 2.0, opt).or_inf();
  const double S2 = std::isfinite(S0) ? S0 * S0 : kInf;
  std::vector<DecayRow> rows;
  rows.reserve(times.size());
  for (double tt : times) {
    DecayRow r;
    r.t = tt;
    if (tt <= 0.0) {
      r.H = H0;
      r.I = I0;
      r.S = S0;
    } else {
      Evolved ev(t, tt, opt);
      r.H = ev.entropy().or_inf();
      r.I = ev.fisher().or_inf();
      r.S = ev.discrepancy().or_inf();
    }
    fill_bounds(r, H0, I0, S2);
    rows.push_back(r);
  }
  return rows;
}

DeBruijnResult de_bruijn_check(const Target& t, double T, int grid_points,
                               const QuadOptions& opt) {
  if (grid_points < 2) throw std::invalid_argument("de_bruijn_check: need >= 2 points");
  DeBruijnResult res;
  const Reference g = ref_gaussian();
  auto Hv = relative_entropy(t, g, opt);
  res.H = Hv.or_inf();
  auto I0v = fisher_information(t, g, opt);
  const double I0 = I0v.or_inf();
  SteinKernel k = stein_kernel(t, g, opt);
  auto Sv = stein_discrepancy(t, g, k, 2.0, opt);
  const double S0 = Sv.or_inf();
  if (!std::isfinite(res.H) || !std::isfinite(I0) || !std::isfinite(S0)) {
    res.indeterminate = true;
    res.note = !std::isfinite(res.H)   ? "relative entropy is infinite"
               : !std::isfinite(I0)    ? "initial Fisher information is infinite"
                                       : "initial discrepancy is infinite";
    res.residual = kNaN;
    return res;
  }
  const double S2 = S0 * S0;
  const double t0 = 1e-4;
  const int n = grid_points;
  std::vector<double> ts(n), Is(n);
  const double ratio = std::pow(T / t0, 1.0 / (n - 1));
  for (int i = 0; i < n; ++i) ts[i] = i + 1 == n ? T : t0 * std::pow(ratio, i);
  for (int i = 0; i < n; ++i) {
    Evolved ev(t, ts[i], opt);
    auto Iv = ev.fisher();
    if (Iv.diverged || !std::isfinite(Iv.value)) {
      res.indeterminate = true;
      res.note = "Fisher information along the flow is infinite";
      res.residual = kNaN;
      return res;
    }
    Is[i] = Iv.value;
  }
  double grid = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    grid += 0.5 * (Is[i] + Is[i + 1]) * (ts[i + 1] - ts[i]);
  res.head = 0.5 * (I0 + Is[0]) * t0;
  const double w = std::exp(-2.0 * T);
  res.tail = w < 1e-4 ? S2 * (0.25 * w * w + w * w * w / 6.0)
                      : S2 * 0.5 * (-w - std::log1p(-w));
  res.integral = res.head + grid + res.tail;
  res.residual = res.H - res.integral;
  return res;
}

ScoreEstimate score_mc(const Target& t, double time, double x, long samples,
                       std::uint64_t seed, double bandwidth_factor) {
  ScoreEstimate est;
  if (!(time > 0.0)) {
    est.flagged = true;
    est.note = "score representation needs time > 0";
    return est;
  }
  if (samples < 1) {
    est.flagged = true;
    est.note = "no samples";
    return est;
  }
  const double e = std::exp(-time);
  const double s = std::sqrt(std::max(0.0, -std::expm1(-2.0 * time)));
  SteinKernel k = stein_kernel(t, ref_gaussian());
  if (!k.valid) {
    est.flagged = true;
    est.note = "kernel invalid: " + k.note;
    return est;
  }
  const double sigt = std::sqrt(sqr(e * t.scale) + s * s);
  const double bw = std::max(1e-12, bandwidth_factor * sigt);
  Rng rng(seed);
  double sw = 0.0, swy = 0.0, sw2 = 0.0;
  std::vector<double> ws, ys;
  ws.reserve(1024);
  ys.reserve(1024);
  for (long i = 0; i < samples; ++i) {
    const double F = t.sample(rng);
    const double Z = rng.normal();
    const double Ft = e * F + s * Z;
    const double d = (Ft - x) / bw;
    if (std::fabs(d) > 8.0) continue;
    const double w = std::exp(-0.5 * d * d);
    const double y = (k(F) - 1.0) * Z;
    sw += w;
    swy += w * y;
    sw2 += w * w;
    ws.push_back(w);
    ys.push_back(y);
  }
  if (!(sw > 0.0)) {
    est.flagged = true;
    est.note = "no samples landed near the conditioning point";
    return est;
  }
  const double pref = e * e / s;
  const double m = swy / sw;
  est.value = pref * m;
  double var = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) var += sqr(ws[i] * (ys[i] - m));
  est.se = pref * std::sqrt(var) / sw;
  est.used = static_cast<long>(sw * sw / std::max(sw2, 1e-300));
  if (est.used < 30) {
    est.flagged = true;
    est.note = "fewer than 30 effective samples near the conditioning point";
  }
  return est;
}

}  // namespace steinlab
