#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace steinlab {

// Exact univariate polynomials over the rationals. The iterated-gradient
// recursion amplifies rounding, so this layer is exact end to end; doubles
// enter only when slacks are evaluated on a point grid.
using Rat = boost::multiprecision::cpp_rational;

struct RatPoly {
  std::vector<Rat> c;  // c[k] * x^k, normalized (no trailing zeros)

  RatPoly() = default;
  explicit RatPoly(std::vector<Rat> coeffs);
  static RatPoly constant(const Rat& v);
  static RatPoly monomial(int degree, const Rat& coeff = Rat(1));
  // Doubles convert exactly (binary rationals).
  static RatPoly from_doubles(const std::vector<double>& coeffs);

  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c.empty(); }
  void trim();

  RatPoly derivative() const;
  Rat eval(const Rat& x) const;
  double eval(double x) const;
  std::string str() const;  // human-readable, for reports

  friend RatPoly operator+(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator-(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(const Rat& s, const RatPoly& a);
  friend bool operator==(const RatPoly& a, const RatPoly& b);
};

// 1D diffusion generator L f = a f'' + b f'.
struct Diffusion1D {
  RatPoly a, b;
  double lo = 0.0, hi = 0.0;  // support (for grid evaluation)
  std::string name;
};

Diffusion1D model_ou();                     // a = 1, b = -x on R
Diffusion1D model_laguerre(const Rat& p);   // a = x, b = p - x on (0, inf)
Diffusion1D model_jacobi();                 // a = 1-x^2, b = -2x on (-1, 1)
Diffusion1D model_log_concave(const RatPoly& u);  // a = 1, b = -u' on R

RatPoly apply_L(const Diffusion1D& m, const RatPoly& f);

// Gamma_1(f,g) = a f' g'; Gamma_n by the commutator recursion
// Gamma_n(f,g) = 1/2 [L Gamma_{n-1}(f,g) - Gamma_{n-1}(f, Lg)
//                     - Gamma_{n-1}(g, Lf)].
RatPoly gamma_bilinear(const Diffusion1D& m, int n, const RatPoly& f, const RatPoly& g);
RatPoly iterated_gamma(const Diffusion1D& m, int n, const RatPoly& f);

// Sampling falsifier for the three curvature criteria
//   (i) Gamma_2 >= rho Gamma, (ii) Gamma_3 >= kappa Gamma_2,
//   (iii) Gamma_2 >= sigma (a f'')^2,
// over random polynomials (degree <= max_degree, coefficients in [-1,1])
// evaluated on a point grid in the support.
struct CriteriaReport {
  struct One {
    std::string criterion;
    double min_slack = 0.0;
    std::vector<double> argmin_f;  // coefficients of the worst draw
    double argmin_x = 0.0;
  };
  One c1, c2, c3;
  bool pass = false;  // all min slacks >= -1e-9
};

CriteriaReport check_criteria(const Diffusion1D& m, double rho, double kappa,
                              double sigma, int draws = 1000, int max_degree = 4,
                              std::uint64_t seed = 7u,
                              const std::vector<double>& grid = {});

// Pointwise conditions admitting a log-concave model e^{-u} with constants
// (c, 3c, 1):  u'' >= c,
//   (A)  u'''' - u' u''' + 2 u''^2 - 6 c u'' >= 0,
//   (B)  3 u'''^2 <= 2 (u'' - c) (u'''' - u' u''' + 2 u''^2 - 6 c u'').
struct LogConcaveReport {
  bool pass = false;
  double min_slack_convexity = 0.0, worst_x_convexity = 0.0;
  double min_slack_a = 0.0, worst_x_a = 0.0;
  double min_slack_b = 0.0, worst_x_b = 0.0;
};

LogConcaveReport log_concave_conditions(const RatPoly& u, double c,
                                        const std::vector<double>& grid = {});

// Default evaluation grid for a model's support.
std::vector<double> default_grid(const Diffusion1D& m);

}  // namespace steinlab
