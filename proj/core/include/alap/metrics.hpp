#pragma once

#include <span>
#include <string>
#include <vector>

#include "alap/al.hpp"
#include "alap/base_distribution.hpp"
#include "alap/rng.hpp"

namespace alap {

struct MetricEstimate {
  double value = 0.0;
  enum class Kind { exact, lower_bound } kind = Kind::exact;
  double confidence_radius = 0.0;
  std::size_t n = 0;
};

/// Reference law interface the estimators need: cdf, quantile and the partial
/// moment E[Z 1{Z<=x}] (for the exact tail integrals of W1).
struct Reference {
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  std::function<double(double)> partial_moment;
  double mean = 0.0;
};

Reference make_reference(const ALParams& p);
Reference make_reference(const BaseDistribution& d);

/// Exact Kolmogorov distance between the empirical law of a sorted sample and
/// the reference; DKW 99% radius attached.
MetricEstimate empirical_kolmogorov(std::span<const double> sorted, const Reference& ref);

/// Exact Wasserstein-1 distance between the empirical law and the reference:
/// integral of |F_n - F| with closed-form segment and tail integrals via the
/// reference partial moment. Bootstrap radius is attached separately by
/// bootstrap_radius_w1.
MetricEstimate empirical_wasserstein(std::span<const double> sorted, const Reference& ref);

/// Smooth-metric certified lower bound: sup over the test family
/// { -cos(wx+phi)/w^2 : w in 2^{-3..4}, phi in {0, pi/2} } union {x, -x}
/// of |mean h(sample) - E h(Z)|, with E h(Z) in closed form through the AL
/// characteristic function. For d12 the frequencies are restricted to w >= 1
/// so that every member is 1-Lipschitz.
enum class SmoothClass { d2, d12 };
MetricEstimate smooth_lower_bound(std::span<const double> samples, const ALParams& al,
                                  SmoothClass cls);

/// Nonparametric bootstrap (multinomial counts over the sorted sample) for the
/// W1 estimator: returns the 99% radius over `resamples` replicates.
double bootstrap_radius_w1(std::span<const double> sorted, const Reference& ref, Rng& rng,
                           int resamples = 200);

/// Same for the smooth lower bound.
double bootstrap_radius_smooth(std::span<const double> samples, const ALParams& al,
                               SmoothClass cls, Rng& rng, int resamples = 200);

/// Largest per-member standard error of the smooth family (self-test yardstick).
double smooth_family_se(std::span<const double> samples, const ALParams& al, SmoothClass cls);

/// Two-sample Kolmogorov-Smirnov statistic and its asymptotic critical value.
double two_sample_ks(std::span<const double> sorted_a, std::span<const double> sorted_b);
double ks_critical(double alpha, std::size_t n, std::size_t m);

}  // namespace alap
