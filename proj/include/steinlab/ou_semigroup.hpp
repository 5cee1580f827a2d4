#pragma once

#include <memory>
#include <vector>

#include "steinlab/functionals.hpp"
#include "steinlab/measures.hpp"
#include "steinlab/rng.hpp"

namespace steinlab {

// Ornstein-Uhlenbeck evolution of a target against the standard Gaussian:
// P_t f(x) = int f(e^{-t} x + sqrt(1-e^{-2t}) y) dgamma(y).
// The evolved relative density h_t = P_t h, its derivative (via
// nabla P_t h = e^{-t} P_t(nabla h)) and the evolved kernel
// tau_t = e^{-2t} P_t(h tau)/P_t h + (1 - e^{-2t}) are exposed as callables.
// Smooth full-support targets use fixed Gauss-Hermite; targets with support
// edges or interior spikes switch to breakpoint-aware adaptive integration in
// the Mehler variable (the image of edges/spikes under the change of
// variables), which the fixed rule under-resolves.
class Evolved {
 public:
  Evolved(const Target& base, double t, const QuadOptions& opt = default_quad_options());

  double t() const { return t_; }
  const Target& base() const { return base_; }

  double h(double x) const;        // P_t h
  double h_prime(double x) const;  // (P_t h)'
  double density(double x) const;  // h_t * phi
  double tau(double x) const;      // evolved kernel

  FunctionalValue entropy() const;
  FunctionalValue fisher() const;
  FunctionalValue discrepancy() const;  // S(nu^t | gamma)

  // The evolved measure as a Target (full support for t > 0).
  Target as_target() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  Target base_;
  double t_ = 0.0;
};

// Raw Mehler average of an arbitrary function (test hook).
double mehler_apply(const std::function<double(double)>& f, double t, double x,
                    int gh_nodes = 0);

// One row of the decay table: evolved functionals and every decay bound.
struct DecayRow {
  double t = 0.0;
  double H = 0.0, I = 0.0, S = 0.0;
  double bound_I_lsi = 0.0;       // e^{-2t} I0
  double bound_I_stein = 0.0;     // e^{-4t} S0^2/(1-e^{-2t})
  double bound_I_improved = 0.0;  // e^{-2t} S0^2 I0/(S0^2+(e^{2t}-1) I0)
  double bound_H_exp = 0.0;       // e^{-2t} H0
  double bound_H_hsi1 = 0.0;      // e^{-4t} H0/(e^{-2t}+(1-e^{-2t}) H0/S0^2)
  double bound_H_hsi2 = 0.0;      // e^{-4t} S0^2/(1-e^{-2t})
};

std::vector<DecayRow> decay_curves(const Target& t, const std::vector<double>& times,
                                   const QuadOptions& opt = default_quad_options());

// Integrated heat-flow identity H = int_0^inf I(nu^t) dt, checked with a
// trapezoidal grid on [t0, T] (geometric, n points, t0 = 1e-4), a trapezoidal
// head on [0, t0], and the analytic tail int_T^inf e^{-4t} S^2/(1-e^{-2t}) dt
// = S^2 (-w - log(1-w))/2, w = e^{-2T}.
struct DeBruijnResult {
  double H = 0.0;
  double integral = 0.0;  // head + grid + tail
  double head = 0.0, tail = 0.0;
  double residual = 0.0;  // H - integral
  bool indeterminate = false;
  std::string note;
};

DeBruijnResult de_bruijn_check(const Target& t, double T = 8.0, int grid_points = 640,
                               const QuadOptions& opt = default_quad_options());

// Monte Carlo estimate of the evolved score nabla v_t(x) via the
// conditional-expectation representation
//   e^{-2t} (1-e^{-2t})^{-1/2} E[(tau(F) - 1) Z | F_t = x],
// smoothed by a Nadaraya-Watson window of width bandwidth_factor*std(F_t).
struct ScoreEstimate {
  double value = 0.0;
  double se = 0.0;
  long used = 0;  // effective number of conditioning hits
  bool flagged = false;
  std::string note;
};

ScoreEstimate score_mc(const Target& t, double time, double x, long samples,
                       std::uint64_t seed, double bandwidth_factor = 0.1);

}  // namespace steinlab
