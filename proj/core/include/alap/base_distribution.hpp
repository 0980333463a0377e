#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "alap/rng.hpp"

namespace alap {

struct Atom {
  double x;
  double mass;
};

struct MomentProfile {
  double mean;
  double variance;
  double abs3;  // E|W|^3
  double abs4;  // E[W^4]
  double raw3;  // E[W^3]
};

/// Capability record for an input law of the equilibrium transform and the
/// Monte Carlo drivers. Truncated moments trunc_moment(k, x) = E[W^k 1{W<=x}]
/// are the workhorse: the cdf is k=0, the partial moment E[W 1{W<=x}] is k=1,
/// and absolute/signed moments of shifted or scaled variants follow exactly.
/// The indicator is left-closed: an atom at x is included.
struct BaseDistribution {
  std::string name;
  double mean = 0.0;
  double variance = 1.0;
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  bool discrete = false;
  std::vector<Atom> atoms;  // finite discrete support only; empty otherwise

  std::function<double(double)> density_or_mass;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;       // u in (0,1)
  std::function<double(int, double)> trunc_moment;
  std::function<double(int)> raw_moment;
  std::function<double(Rng&)> sample;

  double partial_moment(double x) const { return trunc_moment(1, x); }
  double abs_moment(int k) const;
  double signed_abs_moment(int k) const;
  MomentProfile profile() const;
};

// Built-in families. Every factory supplies exact analytic truncated moments.
BaseDistribution two_point(double x1, double p1, double x2);
BaseDistribution rademacher();
BaseDistribution rademacher_shifted(double m);
BaseDistribution uniform_dist(double a, double b);
BaseDistribution normal_dist(double mean, double sd);
struct MixComponent {
  double weight;
  double mean;
  double sd;
};
BaseDistribution normal_mixture(const std::vector<MixComponent>& comps);
BaseDistribution laplace_dist(double b);
BaseDistribution exponential_unit();
BaseDistribution geometric_dist(double p);
BaseDistribution beta_dist(double alpha, double beta);
BaseDistribution al_base(double mu, double a, double b);

/// Finite discrete law from an atom list (sorted and merged internally).
BaseDistribution discrete_from_atoms(std::string name, std::vector<Atom> atoms);

/// W + c and c * W with all capabilities transformed exactly.
BaseDistribution shift(const BaseDistribution& base, double c);
BaseDistribution scale(const BaseDistribution& base, double c);

/// The catalogue used by the verification suites.
std::vector<BaseDistribution> builtin_bases();

/// Parse "name:comma,separated,params", e.g. "normal:0,1", "rademacher",
/// "twopoint:-0.5,0.8,2", "al:0,0.5,1". Throws std::invalid_argument.
BaseDistribution parse_base(const std::string& spec);

}  // namespace alap
