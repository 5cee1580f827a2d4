#include "steinlab/gamma_calculus.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steinlab/numeric.hpp"
#include "steinlab/rng.hpp"

namespace steinlab {

// ---------------------------------------------------------------------------
// Exact polynomial arithmetic

RatPoly::RatPoly(std::vector<Rat> coeffs) : c(std::move(coeffs)) { trim(); }

RatPoly RatPoly::constant(const Rat& v) { return RatPoly({v}); }

RatPoly RatPoly::monomial(int degree, const Rat& coeff) {
  if (degree < 0) throw std::invalid_argument("monomial: negative degree");
  std::vector<Rat> c(degree + 1, Rat(0));
  c[degree] = coeff;
  return RatPoly(std::move(c));
}

RatPoly RatPoly::from_doubles(const std::vector<double>& coeffs) {
  std::vector<Rat> c;
  c.reserve(coeffs.size());
  for (double v : coeffs) c.emplace_back(v);  // binary doubles convert exactly
  return RatPoly(std::move(c));
}

void RatPoly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

RatPoly RatPoly::derivative() const {
  if (c.size() <= 1) return RatPoly();
  std::vector<Rat> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = Rat(static_cast<int>(k)) * c[k];
  return RatPoly(std::move(d));
}

Rat RatPoly::eval(const Rat& x) const {
  Rat acc(0);
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

double RatPoly::eval(double x) const {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k].convert_to<double>();
  return acc;
}

std::string RatPoly::str() const {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0) continue;
    if (!first) os << " + ";
    os << "(" << c[k] << ")";
    if (k == 1)
      os << " x";
    else if (k > 1)
      os << " x^" << k;
    first = false;
  }
  return os.str();
}

RatPoly operator+(const RatPoly& a, const RatPoly& b) {
  std::vector<Rat> c(std::max(a.c.size(), b.c.size()), Rat(0));
  for (std::size_t k = 0; k < a.c.size(); ++k) c[k] += a.c[k];
  for (std::size_t k = 0; k < b.c.size(); ++k) c[k] += b.c[k];
  return RatPoly(std::move(c));
}

RatPoly operator-(const RatPoly& a, const RatPoly& b) {
  std::vector<Rat> c(std::max(a.c.size(), b.c.size()), Rat(0));
  for (std::size_t k = 0; k < a.c.size(); ++k) c[k] += a.c[k];
  for (std::size_t k = 0; k < b.c.size(); ++k) c[k] -= b.c[k];
  return RatPoly(std::move(c));
}

RatPoly operator*(const RatPoly& a, const RatPoly& b) {
  if (a.is_zero() || b.is_zero()) return RatPoly();
  std::vector<Rat> c(a.c.size() + b.c.size() - 1, Rat(0));
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) c[i + j] += a.c[i] * b.c[j];
  return RatPoly(std::move(c));
}

RatPoly operator*(const Rat& s, const RatPoly& a) {
  std::vector<Rat> c(a.c);
  for (Rat& v : c) v *= s;
  return RatPoly(std::move(c));
}

bool operator==(const RatPoly& a, const RatPoly& b) { return a.c == b.c; }

// ---------------------------------------------------------------------------
// Models

Diffusion1D model_ou() {
  Diffusion1D m;
  m.a = RatPoly::constant(Rat(1));
  m.b = RatPoly::monomial(1, Rat(-1));
  m.lo = -12.0;
  m.hi = 12.0;
  m.name = "ou";
  return m;
}

Diffusion1D model_laguerre(const Rat& p) {
  Diffusion1D m;
  m.a = RatPoly::monomial(1, Rat(1));
  m.b = RatPoly({p, Rat(-1)});
  m.lo = 0.0;
  m.hi = 24.0;
  m.name = "laguerre";
  return m;
}

Diffusion1D model_jacobi() {
  Diffusion1D m;
  m.a = RatPoly({Rat(1), Rat(0), Rat(-1)});
  m.b = RatPoly::monomial(1, Rat(-2));
  m.lo = -1.0;
  m.hi = 1.0;
  m.name = "jacobi";
  return m;
}

Diffusion1D model_log_concave(const RatPoly& u) {
  Diffusion1D m;
  m.a = RatPoly::constant(Rat(1));
  m.b = Rat(-1) * u.derivative();
  m.lo = -12.0;
  m.hi = 12.0;
  m.name = "log_concave";
  return m;
}

RatPoly apply_L(const Diffusion1D& m, const RatPoly& f) {
  const RatPoly fp = f.derivative();
  return m.a * fp.derivative() + m.b * fp;
}

RatPoly gamma_bilinear(const Diffusion1D& m, int n, const RatPoly& f, const RatPoly& g) {
  if (n < 1) throw std::invalid_argument("gamma_bilinear: order must be >= 1");
  if (n == 1) return m.a * f.derivative() * g.derivative();
  const Rat half(1, 2);
  const RatPoly prev = gamma_bilinear(m, n - 1, f, g);
  return half * (apply_L(m, prev) - gamma_bilinear(m, n - 1, f, apply_L(m, g)) -
                 gamma_bilinear(m, n - 1, g, apply_L(m, f)));
}

RatPoly iterated_gamma(const Diffusion1D& m, int n, const RatPoly& f) {
  return gamma_bilinear(m, n, f, f);
}

// ---------------------------------------------------------------------------
// Criterion sampler

std::vector<double> default_grid(const Diffusion1D& m) {
  const int n = 400;
  std::vector<double> g;
  g.reserve(n + 1);
  for (int i = 0; i <= n; ++i) g.push_back(m.lo + (m.hi - m.lo) * i / n);
  return g;
}

CriteriaReport check_criteria(const Diffusion1D& m, double rho, double kappa, double sigma,
                              int draws, int max_degree, std::uint64_t seed,
                              const std::vector<double>& grid) {
  if (draws < 1) throw std::invalid_argument("check_criteria: need at least one draw");
  if (max_degree < 1) throw std::invalid_argument("check_criteria: need degree >= 1");
  const std::vector<double>& xs = grid.empty() ? default_grid(m) : grid;
  if (xs.empty()) throw std::invalid_argument("check_criteria: empty point grid");

  CriteriaReport rep;
  rep.c1.criterion = "Gamma2 >= rho Gamma";
  rep.c2.criterion = "Gamma3 >= kappa Gamma2";
  rep.c3.criterion = "Gamma2 >= sigma (a f'')^2";
  rep.c1.min_slack = rep.c2.min_slack = rep.c3.min_slack = kInf;

  Rng rng(seed);
  std::vector<double> coeffs(max_degree + 1);
  for (int d = 0; d < draws; ++d) {
    for (double& v : coeffs) v = 2.0 * rng.uniform() - 1.0;
    const RatPoly f = RatPoly::from_doubles(coeffs);
    const RatPoly g1 = iterated_gamma(m, 1, f);
    const RatPoly g2 = iterated_gamma(m, 2, f);
    const RatPoly g3 = iterated_gamma(m, 3, f);
    const RatPoly af2 = m.a * f.derivative().derivative();

    for (double x : xs) {
      const double v1 = g1.eval(x), v2 = g2.eval(x), v3 = g3.eval(x);
      const double h = af2.eval(x);
      const double s1 = v2 - rho * v1;
      const double s2 = v3 - kappa * v2;
      const double s3 = v2 - sigma * h * h;
      if (s1 < rep.c1.min_slack) {
        rep.c1.min_slack = s1;
        rep.c1.argmin_f = coeffs;
        rep.c1.argmin_x = x;
      }
      if (s2 < rep.c2.min_slack) {
        rep.c2.min_slack = s2;
        rep.c2.argmin_f = coeffs;
        rep.c2.argmin_x = x;
      }
      if (s3 < rep.c3.min_slack) {
        rep.c3.min_slack = s3;
        rep.c3.argmin_f = coeffs;
        rep.c3.argmin_x = x;
      }
    }
  }
  rep.pass = rep.c1.min_slack >= -1e-9 && rep.c2.min_slack >= -1e-9 &&
             rep.c3.min_slack >= -1e-9;
  return rep;
}

// ---------------------------------------------------------------------------
// Log-concave admissibility

LogConcaveReport log_concave_conditions(const RatPoly& u, double c,
                                        const std::vector<double>& grid) {
  std::vector<double> xs = grid;
  if (xs.empty()) {
    Diffusion1D m = model_log_concave(u);
    xs = default_grid(m);
  }
  const RatPoly u1 = u.derivative();
  const RatPoly u2 = u1.derivative();
  const RatPoly u3 = u2.derivative();
  const RatPoly u4 = u3.derivative();

  LogConcaveReport rep;
  rep.min_slack_convexity = rep.min_slack_a = rep.min_slack_b = kInf;
  for (double x : xs) {
    const double d1 = u1.eval(x), d2 = u2.eval(x), d3 = u3.eval(x), d4 = u4.eval(x);
    const double conv = d2 - c;
    const double A = d4 - d1 * d3 + 2.0 * d2 * d2 - 6.0 * c * d2;
    const double B = 2.0 * (d2 - c) * A - 3.0 * d3 * d3;
    if (conv < rep.min_slack_convexity) {
      rep.min_slack_convexity = conv;
      rep.worst_x_convexity = x;
    }
    if (A < rep.min_slack_a) {
      rep.min_slack_a = A;
      rep.worst_x_a = x;
    }
    if (B < rep.min_slack_b) {
      rep.min_slack_b = B;
      rep.worst_x_b = x;
    }
  }
  rep.pass = rep.min_slack_convexity >= -1e-9 && rep.min_slack_a >= -1e-9 &&
             rep.min_slack_b >= -1e-9;
  return rep;
}

}  // namespace steinlab
