#include "alap/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "alap/al.hpp"
#include "alap/base_distribution.hpp"
#include "alap/equilibrium.hpp"
#include "alap/metrics.hpp"
#include "alap/quadrature.hpp"
#include "alap/rng.hpp"
#include "alap/stein.hpp"

namespace alap {

namespace {

struct Checker {
  std::ostream& os;
  int failures = 0;
  void operator()(const std::string& name, bool ok) {
    os << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  }
};

}  // namespace

int selfcheck_stein(std::ostream& os) {
  Checker check{os};
  const ALParams p(0.0, 0.5, 1.0);
  const auto family = default_smooth_family();

  // characterisation: E[A f(W)] = 0 over AL draws, each member within 4 SE
  {
    const std::size_t n = 1000000;
    Rng rng(42001, 0);
    std::vector<double> w(n);
    for (double& v : w) v = al_sample(p, rng);
    bool ok = true;
    double max_thresh = 0.0;
    for (const SmoothFn& fn : family) {
      SteinOperatorInput in{p, fn};
      double mean = 0.0, m2 = 0.0;
      std::size_t c = 0;
      for (double x : w) {
        const double v = stein_apply(in, x);
        ++c;
        const double d = v - mean;
        mean += d / c;
        m2 += d * (v - mean);
      }
      const double se = std::sqrt(m2 / (n - 1) / n);
      ok = ok && std::abs(mean) < 4.0 * se;
      max_thresh = std::max(max_thresh, 4.0 * se);
    }
    check("stein characterisation: |E A f(W)| < 4 SE for 5 test functions", ok);

    // a 0.5-shifted alternative separates by more than 10x the threshold
    const ALParams shifted(0.0, 1.0, 1.0);
    Rng rng2(42002, 0);
    std::vector<double> v(n);
    for (double& x : v) x = al_sample(shifted, rng2);
    const double disc = stein_discrepancy(v, p, family);
    check("stein characterisation: shifted alternative exceeds 10x threshold",
          disc > 10.0 * max_thresh);
  }

  // solution: initial condition and plug-back residual
  {
    std::vector<TestFunction> tf = {indicator_test(0.5), sin_test(), gauss_test(), linear_test()};
    bool ok0 = true;
    for (const auto& t : tf) ok0 = ok0 && std::abs(stein_solve(p, t, 0.0)) < 1e-10;
    check("stein solution: f_h(0) = 0 within 1e-10", ok0);

    const double ap = p.alpha() - std::abs(p.beta());
    SteinSolver solver(p, gauss_test());
    double worst = 0.0;
    for (int i = 0; i < 41; ++i) {
      const double x = -10.0 / ap + (20.0 / ap) * i / 40.0;
      const double resid = 0.5 * p.b * p.b * solver.second(x) + p.a * solver.deriv(x) -
                           solver.value(x) - (gauss_test().h(x) - solver.expectation());
      worst = std::max(worst, std::abs(resid));
    }
    check("stein solution: plug-back residual < 1e-6 on the standard grid", worst < 1e-6);
  }

  // regularity caps of the bounded and Lipschitz families
  {
    std::vector<TestFunction> fam = {indicator_test(-1.0), indicator_test(0.5),
                                     indicator_test(2.0), sin_test(), linear_test()};
    const auto rep = verify_regularity(p, fam);
    check("stein regularity: sup-norm caps hold for indicator and Lipschitz families", rep.ok);
  }

  // E[h(Z)] by quadrature matches Monte Carlo within 4 SE
  {
    const std::size_t n = 200000;
    Rng rng(42003, 0);
    std::vector<double> w(n);
    for (double& v : w) v = al_sample(p, rng);
    bool ok = true;
    for (const SmoothFn& fn : family) {
      const double quadv =
          quad::integrate([&](double t) { return fn.f(t) * al_pdf(p, t); },
                          -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), 1e-12);
      double mean = 0.0, m2 = 0.0;
      std::size_t c = 0;
      for (double x : w) {
        const double v = fn.f(x);
        ++c;
        const double d = v - mean;
        mean += d / c;
        m2 += d * (v - mean);
      }
      const double se = std::sqrt(m2 / (n - 1) / n);
      ok = ok && std::abs(mean - quadv) < 4.0 * se;
    }
    check("stein expectations: quadrature matches Monte Carlo within 4 SE", ok);
  }

  return check.failures;
}

int selfcheck_equilibrium(std::ostream& os) {
  Checker check{os};

  // unit mass for the transformable built-ins (signed evaluation: exact even
  // where the candidate dips negative near a bounded edge)
  {
    std::vector<BaseDistribution> bases = {
        rademacher(),      rademacher_shifted(0.1), uniform_dist(-std::sqrt(3.0), std::sqrt(3.0)),
        normal_dist(0, 1), laplace_dist(1.0),       al_base(0.0, 0.5, std::sqrt(0.75))};
    bool ok = true;
    for (const auto& b : bases) {
      double lo = std::isfinite(b.support_lo) ? b.support_lo : b.quantile(1e-12) - 40.0;
      double hi = std::isfinite(b.support_hi) ? b.support_hi : b.quantile(1.0 - 1e-12) + 40.0;
      std::vector<double> knots;
      for (const Atom& at : b.atoms) knots.push_back(at.x);
      knots.push_back(0.0);
      knots.push_back(1.0);
      const double mass = quad::integrate_knots(
          [&b](double w) { return equilibrium_density_signed(b, w); }, lo, hi, knots, 1e-11);
      ok = ok && std::abs(mass - 1.0) < 1e-8;
    }
    check("equilibrium density: unit mass within 1e-8 for 6 built-in bases", ok);
  }

  // fixed point: AL base reproduces its own density and characteristic function
  {
    const ALParams p(0.0, 0.5, std::sqrt(0.75));
    const BaseDistribution b = al_base(0.0, 0.5, std::sqrt(0.75));
    double sup = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double w = -8.0 + 16.0 * i / 200.0;
      sup = std::max(sup, std::abs(equilibrium_density(b, w) - al_pdf(p, w)));
    }
    check("equilibrium fixed point: AL density reproduced within 1e-8", sup < 1e-8);

    double cfsup = 0.0;
    for (double t : {0.3, 1.0, 2.7}) {
      const auto lhs = equilibrium_cf([&](double s) { return al_cf(p, s); }, b.mean, b.variance,
                                      t, b.raw_moment(3), b.raw_moment(4));
      cfsup = std::max(cfsup, std::abs(lhs - al_cf(p, t)));
    }
    check("equilibrium fixed point: characteristic function within 1e-12", cfsup < 1e-12);
  }

  // support containment for a bounded base
  {
    const auto view = equilibrium_view_cached(rademacher());
    Rng rng(42004, 0);
    bool ok = true;
    for (int i = 0; i < 100000; ++i) ok = ok && std::abs(view->sample(rng)) <= 1.0 + 1e-12;
    check("equilibrium support: |W^A| <= C for a C-bounded base", ok);
  }

  // moment identities against direct quadrature of the density
  {
    bool ok = true;
    for (const auto& b : {rademacher_shifted(0.1), uniform_dist(-std::sqrt(3.0), std::sqrt(3.0))}) {
      std::vector<double> knots;
      for (const Atom& at : b.atoms) knots.push_back(at.x);
      knots.push_back(0.0);
      knots.push_back(1.0);
      for (int r = 0; r <= 3; ++r) {
        const double byquad = quad::integrate_knots(
            [&b, r](double w) { return std::pow(w, r) * equilibrium_density_signed(b, w); },
            b.support_lo, b.support_hi, knots, 1e-12);
        ok = ok && std::abs(byquad - equilibrium_moment(b, r)) < 1e-8;
        const double absquad = quad::integrate_knots(
            [&b, r](double w) {
              return std::pow(std::abs(w), r) * equilibrium_density_signed(b, w);
            },
            b.support_lo, b.support_hi, knots, 1e-12);
        ok = ok && std::abs(absquad - equilibrium_abs_moment(b, r)) < 1e-8;
      }
    }
    check("equilibrium moments: identities match density quadrature within 1e-8", ok);
  }

  // absolute-moment bound E|W^A|^k <= 2(1+(k+2)|a|/sigma) E|W|^{k+2} / ((k+1)(k+2)(s2-a2))
  {
    bool ok = true;
    for (const auto& b : {rademacher_shifted(0.1), al_base(0.0, 0.5, std::sqrt(0.75))}) {
      const double a = b.mean, s2 = b.variance;
      for (int k : {1, 2}) {
        const double lhs = equilibrium_abs_moment(b, k);
        const double rhs = 2.0 * (1.0 + (k + 2.0) * std::abs(a) / std::sqrt(s2)) *
                           b.abs_moment(k + 2) / ((k + 1.0) * (k + 2.0) * (s2 - a * a));
        ok = ok && lhs <= rhs * (1.0 + 1e-12);
      }
    }
    check("equilibrium moments: absolute-moment bound holds for k in {1,2}", ok);
  }

  // coupling W-marginal equals direct simulation (two-sample KS, level 1e-3)
  {
    const std::size_t n = 200000;
    GeometricCoupler coupler(0.25, 0.5, rademacher());
    Rng rng(42005, 0);
    std::vector<double> wc(n), wd(n);
    for (double& v : wc) v = coupler.draw(rng).w;
    Rng rng2(42006, 0);
    const double rp = std::sqrt(0.25);
    for (double& v : wd) {
      const std::uint64_t m = rng2.geometric(0.25);
      double s = 0.0;
      for (std::uint64_t j = 0; j < m; ++j) s += (rng2.uniform() < 0.5 ? -1.0 : 1.0);
      v = rp * (s + m * rp * 0.5);
    }
    std::sort(wc.begin(), wc.end());
    std::sort(wd.begin(), wd.end());
    const double stat = two_sample_ks(wc, wd);
    check("coupling marginal: two-sample KS below the 1e-3 critical value",
          stat <= ks_critical(1e-3, n, n));
  }

  return check.failures;
}

int run_selfcheck(std::ostream& os) {
  int failures = 0;
  failures += selfcheck_stein(os);
  failures += selfcheck_equilibrium(os);
  os << (failures == 0 ? "selfcheck: all checks passed\n"
                       : "selfcheck: " + std::to_string(failures) + " check(s) failed\n");
  return failures;
}

}  // namespace alap
