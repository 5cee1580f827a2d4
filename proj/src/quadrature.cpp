#include "steinlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "steinlab/numeric.hpp"

namespace steinlab {

QuadOptions& default_quad_options() {
  static QuadOptions opt;
  return opt;
}

namespace {

// Gauss-Kronrod 7-15 pair on [-1,1] (positive abscissae; symmetric).
constexpr double kKronrodX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double value;  // K15
  double err;    // |K15 - G7|
  long evals;
};

Panel gk15(const Fn1& f, double a, double b, bool* saw_nan) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fk[15];
  long evals = 0;
  auto ev = [&](double x) {
    double v = f(x);
    ++evals;
    if (std::isnan(v)) {
      *saw_nan = true;
      v = 0.0;
    }
    return v;
  };
  for (int i = 0; i < 7; ++i) {
    fk[i] = ev(c - h * kKronrodX[i]);
    fk[14 - i] = ev(c + h * kKronrodX[i]);
  }
  fk[7] = ev(c);
  double k15 = 0.0;
  for (int i = 0; i < 7; ++i) k15 += kKronrodW[i] * (fk[i] + fk[14 - i]);
  k15 += kKronrodW[7] * fk[7];
  // Gauss nodes are the odd Kronrod indices 1,3,5 plus the center.
  double g7 = kGaussW[3] * fk[7];
  for (int i = 0; i < 3; ++i) g7 += kGaussW[i] * (fk[2 * i + 1] + fk[13 - 2 * i]);
  return Panel{k15 * h, std::fabs((k15 - g7) * h), evals};
}

struct AdaptState {
  const Fn1* f;
  double tol_per_len = 0.0;  // global tolerance / total length
  int max_depth = 0;
  bool saw_nan = false;
  bool converged = true;
  long evals = 0;
  std::vector<double> parts;
  double err = 0.0;

  void refine(double a, double b, const Panel& p, int depth) {
    double len = b - a;
    // Accept on the per-length error budget or once the panel error sits at
    // the relative roundoff floor (further bisection cannot improve it).
    if (p.err <= tol_per_len * len || p.err <= 1e-14 * (1.0 + std::fabs(p.value)) ||
        depth >= max_depth || len < 1e-15 * (1.0 + std::fabs(a))) {
      if (p.err > tol_per_len * len && p.err > 1e-12 * (1.0 + std::fabs(p.value)))
        converged = false;
      parts.push_back(p.value);
      err += p.err;
      return;
    }
    double m = 0.5 * (a + b);
    Panel pl = gk15(*f, a, m, &saw_nan);
    Panel pr = gk15(*f, m, b, &saw_nan);
    evals += pl.evals + pr.evals;
    refine(a, m, pl, depth + 1);
    refine(m, b, pr, depth + 1);
  }
};

}  // namespace

QuadResult integrate(const Fn1& f, double a, double b,
                     const std::vector<double>& breakpoints, const QuadOptions& opt) {
  QuadResult out;
  if (!(a < b)) return out;
  if (std::isinf(a) || std::isinf(b))
    throw std::invalid_argument("integrate: infinite bounds must be truncated by the caller");

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  AdaptState st;
  st.f = &f;
  st.max_depth = opt.max_depth;

  // Rough pass over the pre-split segments to scale the relative tolerance.
  std::vector<Panel> rough;
  double rough_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gk15(f, cuts[i], cuts[i + 1], &st.saw_nan);
    st.evals += p.evals;
    rough_total += std::fabs(p.value);
    rough.push_back(p);
  }
  const double tol_global = std::max(opt.abs_tol, opt.rel_tol * rough_total);
  st.tol_per_len = tol_global / (b - a);

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    st.refine(cuts[i], cuts[i + 1], rough[i], 0);

  out.value = pairwise_sum(st.parts);
  out.error = st.err;
  out.evals = st.evals;
  out.converged = st.converged && !st.saw_nan;
  return out;
}

namespace {

// Nodes/weights of n-point Gauss-Hermite for weight e^{-x^2}, by Newton
// iteration on the orthonormal recurrence (classic algorithm).
void compute_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  // Ascending order.
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
}

struct HermiteCache {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> data;
  const std::pair<std::vector<double>, std::vector<double>>& get(int n) {
    auto it = data.find(n);
    if (it == data.end()) {
      std::vector<double> x, w;
      compute_hermite(n, x, w);
      it = data.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
    }
    return it->second;
  }
};

HermiteCache& hermite_cache() {
  static HermiteCache c;
  return c;
}

}  // namespace

const std::vector<double>& gauss_hermite_nodes(int n) {
  return hermite_cache().get(n).first;
}
const std::vector<double>& gauss_hermite_weights(int n) {
  return hermite_cache().get(n).second;
}

double integrate_gaussian(const Fn1& f, int n) {
  if (n <= 0) n = default_quad_options().gh_nodes;
  const auto& xs = gauss_hermite_nodes(n);
  const auto& ws = gauss_hermite_weights(n);
  const double sqrt2 = std::sqrt(2.0), inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  std::vector<double> terms(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    terms[i] = ws[i] * f(sqrt2 * xs[i]);
  return inv_sqrt_pi * pairwise_sum(terms);
}

namespace {

void compute_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<double> x, w;
    compute_legendre(n, x, w);
    it = cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
  }
  nodes = it->second.first;
  weights = it->second.second;
}

double brent_root(const Fn1& f, double a, double b, double tol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("brent_root: endpoints do not bracket a root");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; d = b - a; e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * 2.220446049250313e-16 * std::fabs(b) + 0.5 * tol;
    double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d; d = p / q;
      } else {
        d = xm; e = d;
      }
    } else {
      d = xm; e = d;
    }
    a = b; fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

double quantile_from_cdf(const Fn1& cdf, double u, double lo_hint, double hi_hint,
                         double lo_bound, double hi_bound) {
  double lo = lo_hint, hi = hi_hint;
  auto g = [&](double x) { return cdf(x) - u; };
  double glo = g(lo), ghi = g(hi);
  double width = std::max(hi - lo, 1e-8);
  int guard = 0;
  while (glo > 0.0 && lo > lo_bound && guard++ < 200) {
    hi = lo; ghi = glo;
    width *= 2.0;
    lo = std::max(lo_bound, lo - width);
    glo = g(lo);
  }
  guard = 0;
  while (ghi < 0.0 && hi < hi_bound && guard++ < 200) {
    lo = hi; glo = ghi;
    width *= 2.0;
    hi = std::min(hi_bound, hi + width);
    ghi = g(hi);
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) {
    // Flat tail: return the nearer bound.
    return glo > 0.0 ? lo : hi;
  }
  return brent_root(g, lo, hi, 1e-14);
}

}  // namespace steinlab
