#include "steinlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "steinlab/quadrature.hpp"
#include "steinlab/special.hpp"

namespace steinlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
  return d;
}

}  // namespace

std::vector<double> graded_grid(double lo, double hi, const std::vector<double>& breaks,
                                double spike_width, int base_cells,
                                double core_lo, double core_hi) {
  if (!std::isfinite(core_lo) || !std::isfinite(core_hi) || !(core_lo < core_hi)) {
    core_lo = lo;
    core_hi = hi;
  }
  core_lo = std::max(core_lo, lo);
  core_hi = std::min(core_hi, hi);
  std::vector<double> xs;
  xs.reserve(base_cells + 256 + 256 * breaks.size());
  for (int i = 0; i <= base_cells; ++i)
    xs.push_back(core_lo + (core_hi - core_lo) * static_cast<double>(i) / base_cells);
  const double c0 = 0.5 * (core_lo + core_hi);
  for (double dir : {-1.0, 1.0}) {
    const double edge = dir < 0.0 ? core_lo : core_hi;
    const double end = dir < 0.0 ? lo : hi;
    double off = std::fabs(edge - c0);
    if (off <= 0.0 || dir * (end - edge) <= 0.0) continue;
    while (true) {
      off *= 1.1;
      double x = c0 + dir * off;
      if (dir * (x - end) >= 0.0) {
        xs.push_back(end);
        break;
      }
      xs.push_back(x);
    }
  }
  if (spike_width > 0.0) {
    for (double b : breaks) {
      if (b <= lo || b >= hi) continue;
      double w = spike_width;
      for (int i = 0; i <= 192; ++i) {
        double x = b - w + 2.0 * w * static_cast<double>(i) / 192.0;
        if (x > lo && x < hi) xs.push_back(x);
      }
    }
  }
  for (double b : breaks)
    if (b > lo && b < hi) xs.push_back(b);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::fabs(a - b) < 1e-300; }),
           xs.end());
  return xs;
}

double CdfCache::cdf(double x) const {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return std::min(1.0, std::max(0.0, F(x)));
}

double CdfCache::quantile(double u) const {
  u = std::min(1.0 - 1e-14, std::max(1e-14, u));
  double flo = F(F.x.front()), fhi = F(F.x.back());
  if (u <= flo) return F.x.front();
  if (u >= fhi) return F.x.back();
  auto g = [&](double x) { return F(x) - u; };
  return brent_root(g, F.x.front(), F.x.back(), 1e-14);
}

std::shared_ptr<CdfCache> build_cdf_cache(const std::function<double(double)>& pdf,
                                          double lo, double hi,
                                          const std::vector<double>& breakpoints,
                                          double spike_width, double core_lo,
                                          double core_hi) {
  if (!(lo < hi)) throw std::invalid_argument("build_cdf_cache: empty range");
  auto grid = graded_grid(lo, hi, breakpoints, spike_width, 2048, core_lo, core_hi);
  std::vector<double> gl_x, gl_w;
  gauss_legendre(7, gl_x, gl_w);
  std::vector<double> cum(grid.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i], b = grid[i + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double cell = 0.0;
    for (std::size_t k = 0; k < gl_x.size(); ++k) cell += gl_w[k] * pdf(c + h * gl_x[k]);
    acc += cell * h;
    cum[i + 1] = acc;
  }
  auto cache = std::make_shared<CdfCache>();
  cache->lo = lo;
  cache->hi = hi;
  cache->mass = acc;
  cache->F = pchip(std::move(grid), std::move(cum));
  return cache;
}

// ---------------------------------------------------------------------------
// Reference

double Reference::a(double x) const {
  switch (kind) {
    case RefKind::Gaussian: return 1.0;
    case RefKind::Gamma: return x;
    case RefKind::Jacobi: return 1.0 - x * x;
    case RefKind::LogConcave: return 1.0;
  }
  return 1.0;
}

double Reference::b(double x) const {
  switch (kind) {
    case RefKind::Gaussian: return -x;
    case RefKind::Gamma: return shape - x;
    case RefKind::Jacobi: return -2.0 * x;
    case RefKind::LogConcave: return -poly_eval(poly_derivative(potential), x);
  }
  return 0.0;
}

double Reference::density(double x) const {
  if (x <= lo || x >= hi) return 0.0;
  switch (kind) {
    case RefKind::Gaussian:
      return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * M_PI * variance);
    case RefKind::Gamma:
      return std::exp((shape - 1.0) * std::log(x) - x - std::lgamma(shape));
    case RefKind::Jacobi:
      return 0.5;
    case RefKind::LogConcave:
      return std::exp(-poly_eval(potential, x) - log_norm);
  }
  return 0.0;
}

double Reference::log_density(double x) const {
  switch (kind) {
    case RefKind::Gaussian:
      return -0.5 * x * x / variance - 0.5 * std::log(variance) - 0.5 * kLog2Pi;
    case RefKind::Gamma:
      return (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
    case RefKind::Jacobi:
      return -std::log(2.0);
    case RefKind::LogConcave:
      return -poly_eval(potential, x) - log_norm;
  }
  return 0.0;
}

double Reference::dlog_density(double x) const {
  switch (kind) {
    case RefKind::Gaussian: return -x / variance;
    case RefKind::Gamma: return (shape - 1.0) / x - 1.0;
    case RefKind::Jacobi: return 0.0;
    case RefKind::LogConcave: return -poly_eval(poly_derivative(potential), x);
  }
  return 0.0;
}

double Reference::cdf(double x) const {
  switch (kind) {
    case RefKind::Gaussian: return normal_cdf(x / std::sqrt(variance));
    case RefKind::Gamma: return x <= 0.0 ? 0.0 : reg_lower_gamma(shape, x);
    case RefKind::Jacobi: return std::min(1.0, std::max(0.0, 0.5 * (x + 1.0)));
    case RefKind::LogConcave: {
      if (!cache) cache = build_cdf_cache([this](double t) { return density(t); }, lo, hi);
      return cache->cdf(x);
    }
  }
  return 0.0;
}

double Reference::quantile(double u) const {
  u = std::min(1.0 - 1e-14, std::max(1e-14, u));
  switch (kind) {
    case RefKind::Gaussian: return std::sqrt(variance) * normal_quantile(u);
    case RefKind::Gamma: return inv_reg_lower_gamma(shape, u);
    case RefKind::Jacobi: return 2.0 * u - 1.0;
    case RefKind::LogConcave: {
      if (!cache) cache = build_cdf_cache([this](double t) { return density(t); }, lo, hi);
      return cache->quantile(u);
    }
  }
  return 0.0;
}

double Reference::mean() const {
  switch (kind) {
    case RefKind::Gaussian: return 0.0;
    case RefKind::Gamma: return shape;
    case RefKind::Jacobi: return 0.0;
    case RefKind::LogConcave: return mean_v;
  }
  return 0.0;
}

double Reference::sd() const {
  switch (kind) {
    case RefKind::Gaussian: return std::sqrt(variance);
    case RefKind::Gamma: return std::sqrt(shape);
    case RefKind::Jacobi: return 0.5773502691896258;
    case RefKind::LogConcave: return sd_v;
  }
  return 1.0;
}

Reference ref_gaussian(double variance) {
  if (!(variance > 0.0)) throw std::domain_error("ref_gaussian: variance must be positive");
  Reference r;
  r.kind = RefKind::Gaussian;
  r.variance = variance;
  r.lo = -kInf;
  r.hi = kInf;
  r.name = variance == 1.0 ? "gaussian" : "gaussian:" + format_g12(variance);
  return r;
}

Reference ref_gamma(double p) {
  if (!(p > 0.0)) throw std::domain_error("ref_gamma: shape must be positive");
  Reference r;
  r.kind = RefKind::Gamma;
  r.shape = p;
  r.lo = 0.0;
  r.hi = kInf;
  r.name = "gamma:" + format_g12(p);
  return r;
}

Reference ref_jacobi() {
  Reference r;
  r.kind = RefKind::Jacobi;
  r.lo = -1.0;
  r.hi = 1.0;
  r.name = "jacobi";
  return r;
}

Reference ref_log_concave(std::vector<double> u_coeffs) {
  Reference r;
  r.kind = RefKind::LogConcave;
  r.potential = std::move(u_coeffs);
  r.name = "log-concave";
  // Effective support: march out until the potential exceeds its central
  // minimum by enough that the density underflows.
  double umin = kInf;
  for (int i = -400; i <= 400; ++i) {
    double u = poly_eval(r.potential, 0.05 * i);
    umin = std::min(umin, u);
  }
  auto cutoff = [&](double dir) {
    double x = 0.0, step = 0.5;
    for (int it = 0; it < 200; ++it) {
      if (poly_eval(r.potential, x) - umin > 400.0) return x;
      x += dir * step;
      step *= 1.25;
      if (std::fabs(x) > 1e6)
        throw std::domain_error("ref_log_concave: potential does not confine");
    }
    return x;
  };
  r.lo = cutoff(-1.0);
  r.hi = cutoff(1.0);
  QuadOptions opt;
  auto un = [&](double x) { return std::exp(-(poly_eval(r.potential, x) - umin)); };
  double z = integrate(un, r.lo, r.hi, {}, opt).value;
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::domain_error("ref_log_concave: non-normalizable potential");
  r.log_norm = umin + std::log(z);
  double m1 = integrate([&](double x) { return x * un(x); }, r.lo, r.hi, {}, opt).value / z;
  double m2 = integrate([&](double x) { return x * x * un(x); }, r.lo, r.hi, {}, opt).value / z;
  r.mean_v = m1;
  r.sd_v = std::sqrt(std::max(1e-12, m2 - m1 * m1));
  return r;
}

// ---------------------------------------------------------------------------
// Target

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  if (const char* env = std::getenv("STEINLAB_SEED")) {
    char* endp = nullptr;
    unsigned long long v = std::strtoull(env, &endp, 10);
    if (endp != env && *endp == '\0') return static_cast<std::uint64_t>(v);
  }
  return kDefaultSeed;
}

double Target::density(double x) const {
  if (x <= lo || x >= hi) return 0.0;
  return pdf(x);
}

double Target::density_prime(double x) const {
  if (x <= lo || x >= hi) return 0.0;
  if (dpdf) return dpdf(x);
  const double h = 1e-6 * (1.0 + std::fabs(x));
  const double xl = std::max(lo, x - h), xr = std::min(hi, x + h);
  return (density(xr) - density(xl)) / (xr - xl);
}

double Target::eff_lo(double radius) const {
  return std::max(lo, center_hint - radius * std::max(scale, 1e-6));
}
double Target::eff_hi(double radius) const {
  return std::min(hi, center_hint + radius * std::max(scale, 1e-6));
}

double Target::cdf(double x) const {
  if (cdf_fn) return std::min(1.0, std::max(0.0, cdf_fn(x)));
  if (!cache) {
    auto [clo, chi] = effective_support(*this);
    auto self = [this](double t) { return density(t); };
    cache = build_cdf_cache(self, clo, chi, breakpoints, spike_width, eff_lo(15.0),
                            eff_hi(15.0));
  }
  return cache->cdf(x);
}

double Target::quantile(double u) const {
  u = std::min(1.0 - 1e-14, std::max(1e-14, u));
  if (cdf_fn) {
    const double s = std::max(scale, 1e-6);
    double lo_bound = std::isfinite(lo) ? lo + 1e-12 * s : center_hint - 60.0 * s;
    double hi_bound = std::isfinite(hi) ? hi - 1e-12 * s : center_hint + 60.0 * s;
    return quantile_from_cdf([this](double x) { return cdf(x); }, u,
                             std::max(lo_bound, center_hint - s),
                             std::min(hi_bound, center_hint + s), lo_bound, hi_bound);
  }
  cdf(center_hint);  // force cache
  return cache->quantile(u);
}

double Target::sample(Rng& rng) const {
  if (sampler_fn) return sampler_fn(rng);
  return quantile(rng.uniform());
}

// ---------------------------------------------------------------------------
// Families

Target target_gaussian_scale(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("gaussian_scale: sigma^2 must be positive");
  const double sigma = std::sqrt(sigma2);
  Target t;
  t.name = "gaussian-scale:" + format_g12(sigma2);
  t.pdf = [sigma, sigma2](double x) {
    return std::exp(-0.5 * x * x / sigma2) / (sigma * std::sqrt(2.0 * M_PI));
  };
  t.dpdf = [sigma, sigma2](double x) {
    return -x / sigma2 * std::exp(-0.5 * x * x / sigma2) / (sigma * std::sqrt(2.0 * M_PI));
  };
  t.cdf_fn = [sigma](double x) { return normal_cdf(x / sigma); };
  t.sampler_fn = [sigma](Rng& r) { return sigma * r.normal(); };
  t.scale = sigma;
  return t;
}

Target target_centered_gamma(double p) {
  if (!(p > 0.0)) throw std::domain_error("centered_gamma: shape must be positive");
  Target t;
  t.name = "centered-gamma:" + format_g12(p);
  t.lo = -p;
  const double lg = std::lgamma(p);
  t.pdf = [p, lg](double x) {
    const double y = x + p;
    if (y <= 0.0) return 0.0;
    return std::exp((p - 1.0) * std::log(y) - y - lg);
  };
  t.dpdf = [p, lg](double x) {
    const double y = x + p;
    if (y <= 0.0) return 0.0;
    return std::exp((p - 1.0) * std::log(y) - y - lg) * ((p - 1.0) / y - 1.0);
  };
  t.cdf_fn = [p](double x) { return x + p <= 0.0 ? 0.0 : reg_lower_gamma(p, x + p); };
  t.sampler_fn = [p](Rng& r) { return r.gamma(p) - p; };
  t.scale = std::sqrt(p);
  return t;
}

Target target_uniform() {
  Target t;
  t.name = "uniform";
  t.lo = -1.0;
  t.hi = 1.0;
  t.pdf = [](double) { return 0.5; };
  t.dpdf = [](double) { return 0.0; };
  t.cdf_fn = [](double x) { return std::min(1.0, std::max(0.0, 0.5 * (x + 1.0))); };
  t.sampler_fn = [](Rng& r) { return 2.0 * r.uniform() - 1.0; };
  t.scale = 0.5773502691896258;
  return t;
}

Target target_mixture(double n, double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("mixture: a outside [0,1]");
  if (!(n >= 1.0)) throw std::domain_error("mixture: n must be >= 1");
  Target t;
  t.name = "mixture:" + format_g12(n) + ":" + format_g12(a);
  t.pdf = [n, a](double x) {
    return (1.0 - a) * normal_pdf(x) + a * n * normal_pdf(n * x);
  };
  t.dpdf = [n, a](double x) {
    return -x * (1.0 - a) * normal_pdf(x) - a * n * n * n * x * normal_pdf(n * x);
  };
  t.cdf_fn = [n, a](double x) { return (1.0 - a) * normal_cdf(x) + a * normal_cdf(n * x); };
  t.sampler_fn = [n, a](Rng& r) {
    double u = r.uniform();
    double z = r.normal();
    return u < a ? z / n : z;
  };
  t.scale = 1.0;
  if (n > 1.0) {
    t.breakpoints = {-8.0 / n, 8.0 / n};
    t.spike_width = 8.0 / n;
  }
  return t;
}

Target target_student_like(double alpha) {
  if (!(alpha > 0.5)) throw std::domain_error("student_like: alpha must exceed 1/2");
  Target t;
  t.name = "student-like:" + format_g12(alpha);
  const double logc = std::lgamma(alpha) - 0.5 * std::log(M_PI) - std::lgamma(alpha - 0.5);
  t.pdf = [alpha, logc](double x) { return std::exp(logc - alpha * std::log1p(x * x)); };
  t.dpdf = [alpha, logc](double x) {
    return std::exp(logc - alpha * std::log1p(x * x)) * (-2.0 * alpha * x / (1.0 + x * x));
  };
  const double df = 2.0 * alpha - 1.0;
  t.sampler_fn = [df](Rng& r) {
    return std::student_t_distribution<double>(df)(r.gen) / std::sqrt(df);
  };
  t.scale = alpha > 1.5 ? std::sqrt(1.0 / (2.0 * alpha - 3.0)) : 10.0;
  return t;
}

// ---------------------------------------------------------------------------
// Pearson solver

Target target_pearson(const PearsonParams& prm) {
  const double lo = prm.lo, hi = prm.hi;
  if (!(lo < hi)) throw std::domain_error("pearson: empty support");
  auto q = [&](double x) { return prm.b0 + x * (prm.b1 + x * prm.b2); };
  auto dlog = [&](double x) { return -(prm.a0 + prm.a1 * x) / q(x); };

  const double x0 = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi)
                    : std::isfinite(lo)                    ? lo + 1.0
                    : std::isfinite(hi)                    ? hi - 1.0
                                                           : 0.0;
  if (q(x0) == 0.0) throw std::domain_error("pearson: kernel vanishes at the anchor");

  // March the log-density outward from the anchor, accumulating the exact
  // derivative with per-cell Gauss-Legendre.
  std::vector<double> gl_x, gl_w;
  gauss_legendre(7, gl_x, gl_w);
  auto cell = [&](double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < gl_x.size(); ++k) s += gl_w[k] * dlog(c + h * gl_x[k]);
    return s * h;
  };

  std::vector<double> xs{x0}, psis{0.0};
  double psi_max = 0.0;
  auto march = [&](double dir) {
    double x = x0, psi = 0.0, step = 0.03;
    const double end = dir > 0.0 ? hi : lo;
    for (int it = 0; it < 4000; ++it) {
      double nx;
      if (std::isfinite(end)) {
        double gap = std::fabs(end - x);
        if (gap < 1e-12 * (1.0 + std::fabs(end))) break;
        nx = x + dir * std::min(step, 0.5 * gap);
        step = std::min(step * 1.03, 0.03 * (1.0 + std::fabs(x)));
      } else {
        nx = x + dir * step;
        step = std::min(step * 1.03, 0.03 * (1.0 + std::fabs(x)));
      }
      if (q(x) * q(nx) <= 0.0)
        throw std::domain_error("pearson: kernel vanishes inside the support");
      psi += cell(x, nx);
      x = nx;
      xs.push_back(x);
      psis.push_back(psi);
      psi_max = std::max(psi_max, psi);
      if (psi - psi_max < -760.0) break;
      // Polynomially decaying tails never underflow; truncate far out and
      // let the shell test below decide integrability.
      if (!std::isfinite(end) && std::fabs(x - x0) > 2e4) break;
    }
  };
  march(+1.0);
  {
    std::vector<double> rx(xs.begin() + 1, xs.end()), rp(psis.begin() + 1, psis.end());
    xs.assign(1, x0);
    psis.assign(1, 0.0);
    march(-1.0);
    std::reverse(xs.begin(), xs.end());
    std::reverse(psis.begin(), psis.end());
    xs.insert(xs.end(), rx.begin(), rx.end());
    psis.insert(psis.end(), rp.begin(), rp.end());
  }
  std::vector<double> slopes(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) slopes[i] = dlog(xs[i]);
  auto psi_interp = std::make_shared<CubicHermite>(xs, psis, slopes);
  const double glo = xs.front(), ghi = xs.back();

  QuadOptions opt;
  // Anchor the global integrals at interior marching nodes: the density can be
  // a narrow feature inside a very wide range, which a cold adaptive pass on
  // [glo, ghi] would step straight over.
  std::vector<double> anchors;
  for (std::size_t j = 1; j < 16; ++j)
    anchors.push_back(xs[j * (xs.size() - 1) / 16]);
  auto un = [psi_interp, psi_max](double x) { return std::exp((*psi_interp)(x)-psi_max); };
  QuadResult zres = integrate(un, glo, ghi, anchors, opt);
  if (!(zres.value > 0.0) || !std::isfinite(zres.value))
    throw std::domain_error("pearson: normalization failed");
  // Endpoint integrability. Near a finite endpoint the innermost shells must
  // carry decreasing mass; toward an infinite endpoint the outermost dyadic
  // shells of the built range must decay.
  for (double end : {lo, hi}) {
    if (!std::isfinite(end)) continue;
    double inner = std::fabs(end - x0) * 1e-6;
    double s1 = integrate(un, end < x0 ? end + inner : end - 2.0 * inner,
                          end < x0 ? end + 2.0 * inner : end - inner, {}, opt).value;
    double s2 = integrate(un, end < x0 ? end + inner * 0.5 : end - inner,
                          end < x0 ? end + inner : end - inner * 0.5, {}, opt).value;
    if (s2 > s1 * 1.05 + 1e-280)
      throw std::domain_error("pearson: non-integrable density at a support endpoint");
  }
  for (double dir : {-1.0, 1.0}) {
    if (std::isfinite(dir < 0.0 ? lo : hi)) continue;
    const double edge = dir < 0.0 ? glo : ghi;
    const double r = std::fabs(edge - x0);
    auto shell = [&](double f0, double f1) {
      double u = x0 + dir * f0 * r, v = x0 + dir * f1 * r;
      return integrate(un, std::min(u, v), std::max(u, v), {}, opt).value;
    };
    double s_in = shell(0.25, 0.5), s_out = shell(0.5, 1.0);
    if (s_out > 1e-250 && s_out >= 0.98 * s_in)
      throw std::domain_error("pearson: density not normalizable (tail mass does not decay)");
  }
  const double log_norm = psi_max + std::log(zres.value);

  Target t;
  t.name = "pearson";
  t.lo = std::isfinite(lo) && glo - lo < 1e-9 * (1.0 + std::fabs(lo)) ? lo : glo;
  t.hi = std::isfinite(hi) && hi - ghi < 1e-9 * (1.0 + std::fabs(hi)) ? hi : ghi;
  t.pdf = [psi_interp, log_norm](double x) { return std::exp((*psi_interp)(x)-log_norm); };
  t.dpdf = [psi_interp, log_norm, dlog](double x) {
    return std::exp((*psi_interp)(x)-log_norm) * dlog(x);
  };
  // Rough scale from the second moment over the built range.
  double m1 = integrate([&t](double x) { return x * t.pdf(x); }, glo, ghi, anchors, opt).value;
  double m2 = integrate([&t](double x) { return x * x * t.pdf(x); }, glo, ghi, anchors, opt).value;
  t.scale = std::sqrt(std::max(1e-12, m2 - m1 * m1));
  t.center_hint = m1;
  if (std::fabs(target_mean(t)) > 1e-9 * std::max(1.0, t.scale)) return center(t);
  return t;
}

Target target_from_density(std::function<double(double)> pdf, double lo, double hi,
                           const std::string& name, bool recenter,
                           std::vector<double> breakpoints) {
  Target t;
  t.name = name;
  t.lo = lo;
  t.hi = hi;
  t.breakpoints = std::move(breakpoints);
  QuadOptions opt;

  // Probe the effective range by doubling until the captured mass stabilizes.
  double radius = 8.0;
  double z_prev = 0.0, z = 0.0, delta = 0.0;
  double tlo = 0.0, thi = 0.0;
  for (int it = 0; it < 12; ++it) {
    tlo = std::max(lo, -radius);
    thi = std::min(hi, radius);
    z = integrate(pdf, tlo, thi, t.breakpoints, opt).value;
    delta = std::fabs(z - z_prev);
    if (it > 0 && delta < 1e-12 * std::max(1.0, z)) break;
    z_prev = z;
    radius *= 2.0;
  }
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::domain_error("target_from_density: non-normalizable density");
  if (delta > 1e-9 * std::max(1.0, z))
    throw std::domain_error(
        "target_from_density: mass did not stabilize within the probe range");
  const double inv_z = 1.0 / z;
  auto base = std::move(pdf);
  t.pdf = [base, inv_z](double x) { return base(x) * inv_z; };

  double m1 = integrate([&t](double x) { return x * t.pdf(x); }, tlo, thi, t.breakpoints, opt).value;
  double m2 = integrate([&t](double x) { return x * x * t.pdf(x); }, tlo, thi, t.breakpoints, opt).value;
  double var = m2 - m1 * m1;
  t.scale = std::isfinite(var) && var > 0.0 ? std::sqrt(var) : 0.25 * (thi - tlo);
  t.center_hint = m1;
  if (recenter) return center(t);
  return t;
}

// ---------------------------------------------------------------------------
// Tilted families

Target target_tilted(const Reference& ref, const std::vector<double>& h_coeffs,
                     const std::string& name) {
  const Reference r = ref;
  const std::vector<double> hc = h_coeffs;
  const std::vector<double> dhc = poly_derivative(hc);
  const double rlo = r.lo, rhi = r.hi;
  const double slo = std::isfinite(rlo) ? rlo : r.mean() - 15.0 * r.sd();
  const double shi = std::isfinite(rhi) ? rhi : r.mean() + 15.0 * r.sd();
  for (int i = 0; i <= 512; ++i) {
    double x = slo + (shi - slo) * i / 512.0;
    if (poly_eval(hc, x) <= 0.0)
      throw std::domain_error("target_tilted: relative density not positive");
  }

  Target t;
  t.name = name;
  t.lo = rlo;
  t.hi = rhi;
  t.pdf = [r, hc](double x) { return poly_eval(hc, x) * r.density(x); };
  t.dpdf = [r, hc, dhc](double x) {
    const double w = r.density(x);
    return (poly_eval(dhc, x) + poly_eval(hc, x) * r.dlog_density(x)) * w;
  };
  t.scale = r.sd();
  t.center_hint = r.mean();
  if (r.kind == RefKind::Gamma) {
    const double p = r.shape;
    t.cdf_fn = [hc, p](double x) {
      if (x <= 0.0) return 0.0;
      double s = 0.0;
      for (std::size_t k = 0; k < hc.size(); ++k) {
        double moment = std::exp(std::lgamma(p + k) - std::lgamma(p));
        s += hc[k] * moment * reg_lower_gamma(p + static_cast<double>(k), x);
      }
      return std::min(1.0, std::max(0.0, s));
    };
  } else if (r.kind == RefKind::Jacobi) {
    t.cdf_fn = [hc](double x) {
      if (x <= -1.0) return 0.0;
      if (x >= 1.0) return 1.0;
      double s = 0.0;
      for (std::size_t k = 0; k < hc.size(); ++k) {
        double kk = static_cast<double>(k) + 1.0;
        s += hc[k] / kk * (std::pow(x, kk) - std::pow(-1.0, kk));
      }
      return std::min(1.0, std::max(0.0, 0.5 * s));
    };
  }
  return t;
}

Target gamma_tilt_quadratic(double p, double eps) {
  // q2 = x^2 - 2(p+1)x + p(p+1): orthogonal to {1, x} in L^2(gamma_p).
  std::vector<double> h{1.0 + eps * p * (p + 1.0), -2.0 * eps * (p + 1.0), eps};
  return target_tilted(ref_gamma(p), h,
                       "gamma-tilt2:" + format_g12(p) + ":" + format_g12(eps));
}

Target gamma_tilt_cubic(double p, double eps) {
  // q3 = x^3 - 3(p+2)x^2 + 3(p+1)(p+2)x - p(p+1)(p+2).
  std::vector<double> h{1.0 - eps * p * (p + 1.0) * (p + 2.0),
                        3.0 * eps * (p + 1.0) * (p + 2.0), -3.0 * eps * (p + 2.0), eps};
  return target_tilted(ref_gamma(p), h,
                       "gamma-tilt3:" + format_g12(p) + ":" + format_g12(eps));
}

Target uniform_tilt_quadratic(double eps) {
  // 1 + eps (3x^2 - 1)/2, orthogonal to {1, x} on [-1,1].
  std::vector<double> h{1.0 - 0.5 * eps, 0.0, 1.5 * eps};
  return target_tilted(ref_jacobi(), h, "uniform-tilt2:" + format_g12(eps));
}

// ---------------------------------------------------------------------------
// Centering

double target_mean(const Target& t) {
  QuadOptions opt;
  auto m_abs = [&](double radius) {
    return integrate([&t](double x) { return std::fabs(x) * t.density(x); },
                     t.eff_lo(radius), t.eff_hi(radius), t.breakpoints, opt)
        .value;
  };
  // Truncation stability: if the absolute-moment mass is still growing when
  // the radius shrinks by 30%, the mean integral does not converge.
  double a_full = m_abs(opt.truncation_radius);
  double a_inner = m_abs(opt.truncation_radius * 0.7);
  if (!(std::fabs(a_full - a_inner) <= 1e-3 * std::max(1.0, a_full)))
    throw std::domain_error("target_mean: mean integral fails to converge");
  return integrate([&t](double x) { return x * t.density(x); }, t.eff_lo(opt.truncation_radius),
                   t.eff_hi(opt.truncation_radius), t.breakpoints, opt)
      .value;
}

std::pair<double, double> effective_support(const Target& t) {
  const double s = std::max(t.scale, 1e-6);
  double peak = 0.0;
  for (int k = -8; k <= 8; ++k)
    peak = std::max(peak, t.density(t.center_hint + 0.25 * s * k));
  const double floor = std::max(1e-300, 1e-22 * peak);
  auto push = [&](double dir) {
    double off = 15.0 * s;
    const double end = dir < 0.0 ? t.lo : t.hi;
    while (off < 3000.0 * s) {
      double x = t.center_hint + dir * off;
      if (dir < 0.0 ? x <= end : x >= end) return end;
      if (t.density(x) < floor) return x;
      off *= 1.15;
    }
    return t.center_hint + dir * off;
  };
  double lo = push(-1.0), hi = push(1.0);
  lo = std::max(lo, t.lo);
  hi = std::min(hi, t.hi);
  return {lo, hi};
}

Target center(const Target& t) {
  const double m = target_mean(t);
  if (std::fabs(m) < 1e-12) return t;
  Target s = t;
  s.name = t.name + ":centered";
  s.lo = std::isfinite(t.lo) ? t.lo - m : t.lo;
  s.hi = std::isfinite(t.hi) ? t.hi - m : t.hi;
  const Target base = t;
  s.pdf = [base, m](double x) { return base.density(x + m); };
  s.dpdf = [base, m](double x) { return base.density_prime(x + m); };
  if (base.cdf_fn) {
    s.cdf_fn = [base, m](double x) { return base.cdf(x + m); };
  } else {
    s.cdf_fn = nullptr;
  }
  if (base.sampler_fn) {
    s.sampler_fn = [base, m](Rng& r) { return base.sampler_fn(r) - m; };
  } else {
    s.sampler_fn = nullptr;
  }
  s.breakpoints.clear();
  for (double b : t.breakpoints) s.breakpoints.push_back(b - m);
  s.center_hint = t.center_hint - m;
  s.cache.reset();
  return s;
}

}  // namespace steinlab
