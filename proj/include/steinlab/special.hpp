#pragma once

namespace steinlab {

// Standard normal density, CDF and quantile.
double normal_pdf(double x);
double normal_cdf(double x);
// Inverse CDF: rational initial guess refined by Halley steps; |Phi(q(u))-u|
// is at machine-precision level over u in (0,1).
double normal_quantile(double u);

// Regularized incomplete gamma functions P(a,x) (lower) and Q(a,x) (upper),
// via the classical series / continued-fraction split at x = a+1.
double reg_lower_gamma(double a, double x);
double reg_upper_gamma(double a, double x);
// Inverse of P(a,.) by bracketed Newton; used for gamma quantiles.
double inv_reg_lower_gamma(double a, double u);

}  // namespace steinlab
