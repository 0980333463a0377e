#include "alap/stein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alap/errors.hpp"
#include "alap/quadrature.hpp"

namespace alap {

namespace {

const double kFdStep = std::cbrt(std::numeric_limits<double>::epsilon());

double fd1(const std::function<double(double)>& f, double x) {
  const double h = kFdStep * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double fd2(const std::function<double(double)>& f, double x) {
  const double h = kFdStep * std::max(1.0, std::abs(x));
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace

double stein_apply(const SteinOperatorInput& in, double x) {
  const auto& fn = in.f;
  const double d2 = fn.d2 ? fn.d2(x) : fd2(fn.f, x);
  const double d1 = fn.d1 ? fn.d1(x) : fd1(fn.f, x);
  const double v = 0.5 * in.params.b * in.params.b * d2 + in.params.a * d1 -
                   (fn.f(x) - fn.f(0.0));
  if (!std::isfinite(v))
    throw numeric_error("stein_apply: non-finite evaluation at x = " + std::to_string(x));
  return v;
}

TestFunction indicator_test(double z) {
  TestFunction t;
  t.h = [z](double x) { return x <= z ? 1.0 : 0.0; };
  t.cls = TestFunction::Class::bounded;
  t.breakpoints = {z};
  t.name = "indicator:" + std::to_string(z);
  return t;
}

TestFunction sin_test() {
  TestFunction t;
  t.h = [](double x) { return std::sin(x); };
  t.cls = TestFunction::Class::lipschitz;
  t.d1 = [](double x) { return std::cos(x); };
  t.name = "sin";
  return t;
}

TestFunction gauss_test() {
  TestFunction t;
  t.h = [](double x) { return std::exp(-x * x); };
  t.cls = TestFunction::Class::lipschitz;
  t.d1 = [](double x) { return -2.0 * x * std::exp(-x * x); };
  t.name = "gauss";
  return t;
}

TestFunction linear_test() {
  TestFunction t;
  t.h = [](double x) { return x; };
  t.cls = TestFunction::Class::lipschitz;
  t.d1 = [](double) { return 1.0; };
  t.name = "linear";
  return t;
}

SteinSolver::SteinSolver(const ALParams& params, TestFunction h, double tol)
    : p_(params), h_(std::move(h)), tol_(tol) {
  if (p_.mu != 0.0) throw std::domain_error("SteinSolver: params must have mu = 0");
  const ALParams& p = p_;
  const auto& hf = h_.h;
  eh_ = quad::integrate_knots([&p, &hf](double t) { return hf(t) * al_pdf(p, t); },
                              -std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity(), h_.breakpoints, 1e-12);
}

// I+(x) = int_0^inf e^{-nu s} h~(x+s) ds   (right integral, shifted)
// I-(x) = int_0^inf e^{-lam s} h~(x-s) ds  (left integral, shifted)
double SteinSolver::weighted_tail(double x, bool right) const {
  const double al = p_.alpha(), be = p_.beta();
  const double rate = right ? (al - be) : (al + be);
  const double cut = 45.0 / rate;  // weight below 1e-16 of its value at x
  const double eh = eh_;
  const auto& hf = h_.h;
  const double sgn = right ? 1.0 : -1.0;
  std::vector<double> knots;
  for (double b : h_.breakpoints) {
    const double s = sgn * (b - x);
    if (s > 0.0 && s < cut) knots.push_back(s);
  }
  return quad::integrate_knots(
      [rate, x, sgn, eh, &hf](double s) { return std::exp(-rate * s) * (hf(x + sgn * s) - eh); },
      0.0, cut, knots, tol_);
}

double SteinSolver::value(double x) const {
  const double c = 1.0 / std::sqrt(2.0 * p_.b * p_.b + p_.a * p_.a);
  return -c * (weighted_tail(x, true) + weighted_tail(x, false));
}

double SteinSolver::deriv(double x) const {
  const double al = p_.alpha(), be = p_.beta();
  const double c = 1.0 / std::sqrt(2.0 * p_.b * p_.b + p_.a * p_.a);
  return -c * ((al - be) * weighted_tail(x, true) - (al + be) * weighted_tail(x, false));
}

double SteinSolver::second(double x) const {
  const double ht = h_.h(x) - eh_;
  return (2.0 / (p_.b * p_.b)) * (ht + value(x) - p_.a * deriv(x));
}

double SteinSolver::third(double x) const {
  if (!h_.d1) throw capability_error("SteinSolver::third: h has no analytic derivative");
  return (2.0 / (p_.b * p_.b)) * (h_.d1(x) + deriv(x) - p_.a * second(x));
}

double stein_solve(const ALParams& p, const TestFunction& h, double x) {
  return SteinSolver(p, h).value(x);
}

RegularityReport verify_regularity(const ALParams& p, const std::vector<TestFunction>& family,
                                   double slack) {
  const double al = p.alpha(), be = std::abs(p.beta());
  const double lo = -20.0 / (al - be);
  const double hi = 20.0 / (al + be);
  const int n = 2001;

  RegularityReport report;
  for (const TestFunction& t : family) {
    SteinSolver solver(p, t);

    std::vector<double> grid;
    grid.reserve(n + 2 * t.breakpoints.size());
    for (int i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * i / (n - 1));
    for (double b : t.breakpoints) {
      grid.push_back(b - 1e-9);
      grid.push_back(b + 1e-9);
    }

    RegularityRow row;
    row.test_name = t.name;
    double sup_h = 0.0;  // ||h~|| or ||h'|| depending on the class
    const bool lipschitz = t.cls == TestFunction::Class::lipschitz;
    for (double x : grid) {
      if (lipschitz)
        sup_h = std::max(sup_h, std::abs(t.d1 ? t.d1(x) : fd1(t.h, x)));
      else
        sup_h = std::max(sup_h, std::abs(t.h(x) - solver.expectation()));
    }
    for (double x : grid) {
      row.sup_f = std::max(row.sup_f, std::abs(solver.value(x)));
      row.sup_d1 = std::max(row.sup_d1, std::abs(solver.deriv(x)));
      row.sup_d2 = std::max(row.sup_d2, std::abs(solver.second(x)));
      if (lipschitz && t.d1) row.sup_d3 = std::max(row.sup_d3, std::abs(solver.third(x)));
    }
    const double c1 = 2.0 / std::sqrt(2.0 * p.b * p.b + p.a * p.a);
    const double c2 = 4.0 / (p.b * p.b);
    if (lipschitz) {
      // (k=0) caps: ||f'|| <= ||h'||, ||f''|| <= c1 ||h'||, ||f'''|| <= c2 ||h'||
      row.cap_f = std::numeric_limits<double>::infinity();
      row.cap_d1 = sup_h;
      row.cap_d2 = c1 * sup_h;
      row.cap_d3 = c2 * sup_h;
      row.ok = row.sup_d1 <= row.cap_d1 + slack && row.sup_d2 <= row.cap_d2 + slack &&
               (!t.d1 || row.sup_d3 <= row.cap_d3 + slack);
    } else {
      row.cap_f = sup_h;
      row.cap_d1 = c1 * sup_h;
      row.cap_d2 = c2 * sup_h;
      row.cap_d3 = std::numeric_limits<double>::infinity();
      row.ok = row.sup_f <= row.cap_f + slack && row.sup_d1 <= row.cap_d1 + slack &&
               row.sup_d2 <= row.cap_d2 + slack;
    }
    report.ok = report.ok && row.ok;
    report.rows.push_back(row);
  }
  return report;
}

double stein_discrepancy(std::span<const double> samples, const ALParams& p,
                         const std::vector<SmoothFn>& family) {
  if (samples.empty()) throw std::domain_error("stein_discrepancy: empty sample");
  double worst = 0.0;
  for (const SmoothFn& fn : family) {
    SteinOperatorInput in{p, fn};
    double mean = 0.0;
    std::size_t count = 0;
    for (double x : samples) mean += (stein_apply(in, x) - mean) / static_cast<double>(++count);
    worst = std::max(worst, std::abs(mean));
  }
  return worst;
}

std::vector<SmoothFn> default_smooth_family() {
  std::vector<SmoothFn> fam;
  fam.push_back({[](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
                 [](double x) { return -std::sin(x); }, "sin"});
  fam.push_back({[](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); },
                 [](double x) { return -std::cos(x); }, "cos"});
  fam.push_back({[](double x) { return std::exp(-x * x); },
                 [](double x) { return -2.0 * x * std::exp(-x * x); },
                 [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); }, "gauss"});
  fam.push_back({[](double x) { return x * std::exp(-x * x); },
                 [](double x) { return (1.0 - 2.0 * x * x) * std::exp(-x * x); },
                 [](double x) { return (4.0 * x * x - 6.0) * x * std::exp(-x * x); }, "xgauss"});
  fam.push_back({[](double x) { return std::tanh(x); },
                 [](double x) {
                   const double c = std::cosh(x);
                   return 1.0 / (c * c);
                 },
                 [](double x) {
                   const double t = std::tanh(x), c = std::cosh(x);
                   return -2.0 * t / (c * c);
                 },
                 "tanh"});
  return fam;
}

}  // namespace alap
