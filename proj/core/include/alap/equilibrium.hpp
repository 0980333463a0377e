#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>

#include "alap/base_distribution.hpp"
#include "alap/rng.hpp"

namespace alap {

/// Raw branch evaluation of the equilibrium transform's candidate density
/// (the two v-integrals over (0,1) with the base's partial moments; zero
/// outside the base's support). For a base with nonzero mean and a bounded
/// support edge on the mean's side, this candidate dips negative near that
/// edge: the transform then has no realisation as a probability law and the
/// signed value is exact where the clamped one below is a proxy.
double equilibrium_density_signed(const BaseDistribution& base, double w);

/// max(0, signed candidate density); the actual density whenever the
/// transform law exists (mean-zero bases, the AL family, laws with heavy
/// enough upper tails).
double equilibrium_density(const BaseDistribution& base, double w);

/// Lazily tabulated cdf/quantile/sampler of W^A: per-interval quadrature of
/// the density on a quantile-spaced knot grid (knots at atoms and 0), cdf by
/// monotone cubic Hermite interpolation, quantile by bracketed bisection plus
/// Newton polish.
class EquilibriumView {
 public:
  explicit EquilibriumView(const BaseDistribution& base);

  double density(double w) const;  // exact evaluation, not interpolated
  double cdf(double w) const;
  double quantile(double u) const;
  double sample(Rng& rng) const;
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  const BaseDistribution& base() const { return *base_; }

 private:
  std::shared_ptr<const BaseDistribution> base_;
  double lo_, hi_;
  std::vector<double> x_, F_, f_;  // knots, cdf values, densities
};

/// Shared per-(base, parameters) view cache used by the samplers below.
std::shared_ptr<const EquilibriumView> equilibrium_view_cached(const BaseDistribution& base);

double equilibrium_cdf(const BaseDistribution& base, double w);
double equilibrium_quantile(const BaseDistribution& base, double u);
double equilibrium_sample(const BaseDistribution& base, Rng& rng);

/// E[(W^A)^r] and E[|W^A|^r] via the moment relations
///   (2 E[W^{r+2}] - 2a(r+2) E[W^{r+1}]) / ((r+1)(r+2)(sigma^2-a^2))
/// and its absolute/signed analogue.
double equilibrium_moment(const BaseDistribution& base, int r);
double equilibrium_abs_moment(const BaseDistribution& base, int r);

/// phi_{W^A}(t) = 2(1 + (a i t - 1) phi_W(t)) / (t^2 (sigma^2 - a^2)).
/// For |t| < 1e-4 a second-order expansion in t is used; it needs the third
/// and fourth raw moments (pass NaN to fall back to direct evaluation).
std::complex<double> equilibrium_cf(const std::function<std::complex<double>(double)>& phi_base,
                                    double a, double sigma2, double t,
                                    double mu3 = std::numeric_limits<double>::quiet_NaN(),
                                    double mu4 = std::numeric_limits<double>::quiet_NaN());

/// Checks (cW)^A = c * W^A at the density level on a grid; returns the sup
/// absolute mismatch of |c| f_{(cW)^A}(c w) vs f_{W^A}(w).
double equilibrium_scale_check(const BaseDistribution& base, double c);

/// Zero-bias transform of a mean-zero law: density E[W 1{W>w}]/sigma^2 with
/// exact truncated moments, inversion sampler included.
BaseDistribution zero_bias(const BaseDistribution& base);

struct CoupledPair {
  double w = 0.0;
  double w_a = 0.0;
  // latent draws, filled per scenario
  std::uint64_t n = 0;  // geometric count N (or S for the nested coupling)
  double b = 0.0;       // Beta(2,1) draw, perturbed coupling
  bool i = false;       // Bernoulli component pick, perturbed coupling
};

/// W = sqrt(p) sum_{i=1}^{N}(X_i + sqrt(p) a), N ~ Geom(p);
/// W^A = sqrt(p)(sum_{i=1}^{N-1}(X_i + sqrt(p) a) + Y^A) with shared summands,
/// Y^A drawn by inversion from the equilibrium view of Y = X + sqrt(p) a.
class GeometricCoupler {
 public:
  GeometricCoupler(double p, double a, const BaseDistribution& x_base);
  CoupledPair draw(Rng& rng) const;
  const EquilibriumView& y_view() const { return *ya_; }

 private:
  double p_, a_;
  BaseDistribution y_;
  std::shared_ptr<const EquilibriumView> ya_;
};

/// W = sum_{j=1}^{N} Y_j with N = sum_{k=1}^{S} T_k, S ~ Geom(q);
/// W^A = sum_{j=1}^{M} Y_j + X^A with M = sum_{k=1}^{S-1} T_k and
/// X = sum_{j=1}^{T} Y_j. The law of X must be representable exactly:
/// T with finite support and Y normal (compound = normal mixture), or
/// T degenerate. Shared Y draws for j <= M.
class NestedGeometricCoupler {
 public:
  NestedGeometricCoupler(double q, const BaseDistribution& t_base, const BaseDistribution& y_base);
  CoupledPair draw(Rng& rng) const;
  const BaseDistribution& x_law() const { return x_; }

 private:
  double q_;
  BaseDistribution t_, y_, x_;
  std::shared_ptr<const EquilibriumView> xa_;
};

/// W = aX + sqrt(X) N_b + eta. W^A follows the proof coupling
///   W^A = I (W - eta) + B I eta + B (1-I) (sqrt(X) N_b + eta^z)
/// with I ~ Bernoulli(b^2/(b^2+tau^2)) and B ~ Beta(2,1), so that
/// |W - W^A| = |(1-B) eta| on {I = 1}.
class PerturbedCoupler {
 public:
  PerturbedCoupler(double a, double b, const BaseDistribution& eta_base);
  CoupledPair draw(Rng& rng) const;
  double bernoulli_mean() const { return b_ * b_ / (b_ * b_ + tau2_); }

 private:
  double a_, b_, tau2_;
  BaseDistribution eta_;
  BaseDistribution eta_z_;
};

}  // namespace alap
