#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "alap/errors.hpp"

namespace alap::quad {

namespace detail {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// absolute-tolerance adaptive bisection over single GK15 panels; regions where
// the integrand has already decayed terminate immediately
inline double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                       int depth) {
  double err = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err);
  // the noise floor keeps integrands that are themselves quadrature-built
  // from triggering unbounded refinement
  if (err <= std::max(tol, 5e-15 * (std::abs(v) + 1.0)) || depth >= 12 ||
      !(b - a > 1e-14 * (std::abs(a) + std::abs(b) + 1.0)))
    return v;
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// One non-adaptive 15-point Gauss-Kronrod panel.
inline double panel(const std::function<double(double)>& f, double a, double b) {
  return detail::GK::integrate(f, a, b, 0, 0.0, nullptr);
}

namespace detail {

}  // namespace detail

/// Adaptive Gauss-Kronrod integration to absolute tolerance; a/b may be
/// infinite (semi-infinite and doubly infinite ranges go through the library's
/// variable transform).
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-11) {
  double v;
  if (std::isfinite(a) && std::isfinite(b)) {
    if (!(b > a)) return 0.0;
    v = detail::adaptive(f, a, b, tol, 0);
  } else {
    v = detail::GK::integrate(f, a, b, 15, tol);
  }
  if (!std::isfinite(v)) throw numeric_error("quadrature produced a non-finite value");
  return v;
}

/// Integrate with the interval split at interior knots (kinks, atoms, jumps).
inline double integrate_knots(const std::function<double(double)>& f, double a, double b,
                              std::span<const double> knots, double tol = 1e-11) {
  std::vector<double> pts;
  pts.push_back(a);
  for (double k : knots)
    if (k > a && k < b) pts.push_back(k);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] > pts[i]) total += integrate(f, pts[i], pts[i + 1], tol);
  }
  return total;
}

}  // namespace alap::quad
