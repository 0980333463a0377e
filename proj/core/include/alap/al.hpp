#pragma once

#include <complex>
#include <cstdint>

#include "alap/rng.hpp"

namespace alap {

/// Parameters of the asymmetric Laplace law AL(mu, a, b): mu location,
/// a asymmetry, b > 0 scale. The derived exponents are
///   alpha = sqrt(2 + a^2/b^2)/b,  beta = a/b^2,
/// with alpha > |beta| automatically; the density decays at rate
/// alpha - beta to the right of mu and alpha + beta to the left.
struct ALParams {
  double mu = 0.0;
  double a = 0.0;
  double b = 1.0;

  ALParams(double mu_, double a_, double b_);

  double alpha() const { return std::sqrt(2.0 + (a * a) / (b * b)) / b; }
  double beta() const { return a / (b * b); }
  double mean() const { return a + mu; }
  /// Var(W) = a^2 + b^2 (translation invariant; follows from the
  /// characteristic function).
  double variance() const { return a * a + b * b; }
};

double al_pdf(const ALParams& p, double x);
double al_cdf(const ALParams& p, double x);
double al_quantile(const ALParams& p, double u);
std::complex<double> al_cf(const ALParams& p, double t);

/// One draw via the normal variance-mean mixture mu + aX + b sqrt(X) N,
/// X unit-rate exponential, N standard normal.
double al_sample(const ALParams& p, Rng& rng);

/// E[W^k 1{W <= x}] for W ~ AL(p), any k >= 0.
double al_trunc_moment(const ALParams& p, int k, double x);
double al_raw_moment(const ALParams& p, int k);
double al_abs_moment(const ALParams& p, int k);
double al_signed_abs_moment(const ALParams& p, int k);

}  // namespace alap
