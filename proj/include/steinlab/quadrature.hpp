#pragma once

#include <functional>
#include <vector>

namespace steinlab {

// Global integration policy. Unbounded integrals are truncated at
// truncation_radius reference standard deviations (double-precision Gaussian
// tails vanish well before 12 sigma); Gaussian-weighted integrals use
// gh_nodes-point Gauss-Hermite by default.
struct QuadOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  int max_depth = 21;
  double truncation_radius = 12.0;
  int gh_nodes = 128;
};

QuadOptions& default_quad_options();

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // a-posteriori estimate
  long evals = 0;
  bool converged = true;
};

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7/15 on [a,b]; the interval is pre-split at the
// supplied breakpoints, then refined by bisection until the local error
// passes the tolerance test. Deterministic: fixed node set, fixed recursion
// order, tree-summed totals.
QuadResult integrate(const Fn1& f, double a, double b,
                     const std::vector<double>& breakpoints = {},
                     const QuadOptions& opt = default_quad_options());

// Gauss-Hermite nodes/weights for weight e^{-x^2} (physicists' convention),
// computed by Newton iteration on the recurrence and cached per n.
const std::vector<double>& gauss_hermite_nodes(int n);
const std::vector<double>& gauss_hermite_weights(int n);

// Integral of f against the standard Gaussian measure via Gauss-Hermite
// (n = 0 picks the default node count).
double integrate_gaussian(const Fn1& f, int n = 0);

// Gauss-Legendre nodes/weights on [-1,1], cached per n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Bracketed root finding (Brent). Requires f(a), f(b) of opposite sign.
double brent_root(const Fn1& f, double a, double b, double tol = 1e-14,
                  int max_iter = 200);

// Solve cdf(x) = u by bracketed root finding, expanding the initial bracket
// geometrically from [lo_hint, hi_hint] if needed.
double quantile_from_cdf(const Fn1& cdf, double u, double lo_hint, double hi_hint,
                         double lo_bound, double hi_bound);

}  // namespace steinlab
