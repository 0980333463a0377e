#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "alap/al.hpp"

namespace alap {

/// A twice-differentiable function with an optional analytic derivative chain.
/// Missing derivatives fall back to central differences with step
/// cbrt(eps) * max(1, |x|).
struct SmoothFn {
  std::function<double(double)> f;
  std::function<double(double)> d1;  // optional
  std::function<double(double)> d2;  // optional
  std::string name;
};

struct SteinOperatorInput {
  ALParams params;  // mu = 0 convention; the caller recentres
  SmoothFn f;
};

/// (b^2/2) f''(x) + a f'(x) - (f(x) - f(0)).
double stein_apply(const SteinOperatorInput& in, double x);

/// Test function h for the Stein equation. `bounded` drives the sup-norm
/// constants of the indicator family; `lipschitz` the ||h'||-scaled ones.
struct TestFunction {
  std::function<double(double)> h;
  enum class Class { bounded, lipschitz } cls = Class::bounded;
  std::function<double(double)> d1;       // needed for f''' estimates
  std::vector<double> breakpoints;        // discontinuities of h
  std::string name;
};

TestFunction indicator_test(double z);
TestFunction sin_test();
TestFunction gauss_test();     // e^{-x^2}
TestFunction linear_test();    // x

/// Evaluates the explicit solution f_h of the AL(0,a,b) Stein equation by
/// exponential-weight quadrature of the two semi-infinite integrals. The
/// weights are truncated where they fall below 1e-16 of their value at x and
/// refined adaptively to 1e-10.
class SteinSolver {
 public:
  SteinSolver(const ALParams& params, TestFunction h, double tol = 1e-10);

  double value(double x) const;
  double deriv(double x) const;
  /// From the ODE: f'' = (2/b^2)(h~ + f - a f').
  double second(double x) const;
  /// f''' = (2/b^2)(h' + f' - a f''); requires an analytic h'.
  double third(double x) const;
  double expectation() const { return eh_; }

 private:
  double weighted_tail(double x, bool right) const;

  ALParams p_;
  TestFunction h_;
  double tol_;
  double eh_ = 0.0;
};

double stein_solve(const ALParams& p, const TestFunction& h, double x);

struct RegularityRow {
  std::string test_name;
  double sup_f = 0.0, sup_d1 = 0.0, sup_d2 = 0.0, sup_d3 = 0.0;
  double cap_f = 0.0, cap_d1 = 0.0, cap_d2 = 0.0, cap_d3 = 0.0;
  bool ok = true;
};

struct RegularityReport {
  std::vector<RegularityRow> rows;
  bool ok = true;
};

/// Grid-sup of |f_h|, |f_h'|, |f_h''| (and |f_h'''| for Lipschitz h with an
/// analytic derivative) against the sup-norm caps, on 2001 points over
/// [-20/(alpha-|beta|), 20/(alpha+|beta|)] plus indicator breakpoints.
RegularityReport verify_regularity(const ALParams& p, const std::vector<TestFunction>& family,
                                   double slack = 1e-6);

/// max over the family of |mean of stein_apply over the sample|.
double stein_discrepancy(std::span<const double> samples, const ALParams& p,
                         const std::vector<SmoothFn>& family);

/// The analytic family used by self-checks and the CLI.
std::vector<SmoothFn> default_smooth_family();

}  // namespace alap
