#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace steinlab {

// Sparse multivariate polynomial on R^n with double coefficients.
// Monomials keyed by exponent vectors (lexicographic order), so iteration
// and all derived computations are deterministic.
struct MPoly {
  using Mono = std::vector<std::uint16_t>;  // exponents, size = dim
  int dim = 0;
  std::map<Mono, double> terms;

  MPoly() = default;
  explicit MPoly(int n) : dim(n) {}

  static MPoly constant(int n, double v);
  static MPoly variable(int n, int i);  // x_{i+1}, zero-based index i

  void add_term(const Mono& m, double coeff);
  bool is_zero(double tol = 0.0) const;
  int total_degree() const;

  MPoly d(int i) const;  // partial derivative
  double eval(const std::vector<double>& x) const;
  std::string str() const;

  friend MPoly operator+(const MPoly& a, const MPoly& b);
  friend MPoly operator-(const MPoly& a, const MPoly& b);
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  friend MPoly operator*(double s, const MPoly& a);
};

// `3*x1^2*x4 - 1.5*x2 + 2` (whitespace-insensitive; `^` powers, implicit 1).
MPoly parse_mpoly(const std::string& text, int dim);

// Exact expectation under the standard Gaussian on R^n by the double
// factorial formula E prod x_i^{k_i} = prod (k_i - 1)!! (odd k_i vanish).
double gaussian_expectation(const MPoly& p);

}  // namespace steinlab
