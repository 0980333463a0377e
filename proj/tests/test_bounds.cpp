#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "alap/base_distribution.hpp"
#include "alap/bounds.hpp"
#include "alap/equilibrium.hpp"
#include "alap/errors.hpp"

using namespace alap;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("thm35 evaluators: hand-checked values") {
  BoundInput in;
  in.a = 0.0;
  in.sigma2 = 1.0;

  // linear Wasserstein form: 2 E|W - W^A|
  in.mean_abs_diff = 0.1;
  CHECK(thm35_bound(Thm35::w, in).value == doctest::Approx(0.2).epsilon(1e-14));

  // beta form at a=0, sigma^2=1, beta=0.1, tail 0.05: 14/sqrt(2)*0.1 + 5*0.05
  in.beta = 0.1;
  in.tail_prob = 0.05;
  const double expect351 = 14.0 / std::sqrt(2.0) * 0.1 + 5.0 * 0.05;
  CHECK(thm35_bound(Thm35::k_beta, in).value == doctest::Approx(expect351).epsilon(1e-14));
  CHECK(expect351 == doctest::Approx(1.23995).epsilon(1e-5));

  // smooth form: (1/sqrt(2)) * 0.01 + 0.02
  in.mean_cond_diff = 0.01;
  in.mean_sq_diff = 0.02;
  const double expect356 = 0.01 / std::sqrt(2.0) + 0.02;
  CHECK(thm35_bound(Thm35::d2, in).value == doctest::Approx(expect356).epsilon(1e-14));
  CHECK(expect356 == doctest::Approx(0.027071).epsilon(1e-4));

  // W^A variants against independent arithmetic
  in.mean_abs_diff = 0.3;
  CHECK(thm35_bound(Thm35::w_wa, in).value ==
        doctest::Approx((1.0 + 2.0 / std::sqrt(2.0)) * 0.3).epsilon(1e-14));
  CHECK(thm35_bound(Thm35::k_wa_mean, in).value ==
        doctest::Approx((2.0 / std::sqrt(2.0) + 4.0) * 0.3).epsilon(1e-14));
  in.beta = 0.2;
  in.tail_prob = 0.01;
  CHECK(thm35_bound(Thm35::k_beta_wa, in).value ==
        doctest::Approx(2.0 / std::sqrt(2.0) * 0.2 + 2.0 * 0.01).epsilon(1e-14));

  // moment form with k = 1
  in.k = 1;
  in.moment_diff_k = 0.05;
  const double lead = 14.0 / std::sqrt(2.0);
  const double inner = (1.0 + 1.0) * 5.0 * 0.05;
  CHECK(thm35_bound(Thm35::k_moment, in).value ==
        doctest::Approx(std::sqrt(lead) * std::sqrt(inner)).epsilon(1e-13));
}

TEST_CASE("perturb evaluators: hand-checked values") {
  PerturbInput in;
  in.a = 0.0;
  in.b = 1.0;
  in.tau = 0.1;
  CHECK(perturb_bound(Perturb::w, in).value ==
        doctest::Approx(0.1 + 0.01 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(perturb_bound(Perturb::w, in).value == doctest::Approx(0.107071).epsilon(1e-5));
  CHECK(perturb_bound(Perturb::w_normal, in).value ==
        doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846) * 0.1 + 0.01 / std::sqrt(2.0))
            .epsilon(1e-14));

  // Chebyshev Kolmogorov form, independent recomputation
  const double v = 1.0 + 0.01;
  const double c = 14.0 / std::sqrt(2.0 * v) + 0.0;
  const double d = 5.0;
  CHECK(perturb_bound(Perturb::k_chebyshev, in).value ==
        doctest::Approx(1.05 * std::cbrt(c * c * d * 0.01 / v) + d * 0.01 / v).epsilon(1e-13));

  // tau -> 0: every variant vanishes
  in.tau = 1e-6;
  for (auto which : {Perturb::k_chebyshev, Perturb::w, Perturb::k_tail, Perturb::k_normal,
                     Perturb::w_normal}) {
    CHECK(perturb_bound(which, in).value < 1e-3);
  }
}

TEST_CASE("geo evaluators: hand-checked values") {
  GeoInput in;
  in.p = 0.01;
  in.a = 0.0;
  in.sigma2 = 1.0;
  in.rho3 = 1.0;
  CHECK(geo_bound(Geo::w, in).value ==
        doctest::Approx(2.0 * 0.1 * (1.0 + 8.0 / 3.0)).epsilon(1e-13));
  CHECK(geo_bound(Geo::w, in).value == doctest::Approx(0.733333).epsilon(1e-5));

  in.sup_inv_dist = 2.0;  // Rademacher summands bounded by 1
  CHECK(geo_bound(Geo::k_inverse, in).value ==
        doctest::Approx(0.1 * (14.0 / std::sqrt(2.0)) * 2.0).epsilon(1e-13));
  CHECK(geo_bound(Geo::k_inverse, in).value == doctest::Approx(1.979899).epsilon(1e-5));
}

TEST_CASE("geo moment bound: exact power-law scaling in p") {
  GeoInput in;
  in.a = 0.3;
  in.sigma2 = 1.0;
  in.k = 1;
  in.rho_k2 = 1.7;
  in.p = 0.04;
  const double v1 = geo_bound(Geo::k_moment, in).value;
  in.p = 0.04 / 100.0;
  const double v2 = geo_bound(Geo::k_moment, in).value;
  // (1/100)^{k/(2(k+1))} with k=1: 10^{-1/2}
  CHECK(v2 / v1 == doctest::Approx(std::pow(0.01, 0.25)).epsilon(1e-12));

  in.k = 2;
  in.p = 0.04;
  const double w1 = geo_bound(Geo::k_moment, in).value;
  in.p = 0.0004;
  const double w2 = geo_bound(Geo::k_moment, in).value;
  CHECK(w2 / w1 == doctest::Approx(std::pow(0.01, 2.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("randstd evaluators: hand-checked values") {
  RandStdInput in;
  in.n = 100;
  in.sigma = 1.0;
  in.a = 0.0;
  in.sum_abs3 = 100.0;
  CHECK(randstd_bound(RandStd::k, in).value == doctest::Approx(0.106).epsilon(1e-12));
  CHECK(randstd_bound(RandStd::w, in).value ==
        doctest::Approx(2.0 * std::sqrt(2.0) / 3.0 * 0.1 + 0.09168).epsilon(1e-12));
  CHECK(randstd_bound(RandStd::w, in).value == doctest::Approx(0.185949).epsilon(1e-4));

  // a = 0 removes the 2|a|/(n+1) term exactly
  RandStdInput am = in;
  am.a = 0.7;
  const double with_a = randstd_bound(RandStd::w, am).value;
  CHECK(with_a - randstd_bound(RandStd::w, in).value ==
        doctest::Approx(2.0 * 0.7 / 101.0).epsilon(1e-12));
  am.sum_kurt = 100.0 * 4.0;
  in.sum_kurt = am.sum_kurt;
  CHECK(randstd_bound(RandStd::d12, am).value - randstd_bound(RandStd::d12, in).value ==
        doctest::Approx(2.0 * 0.7 / 101.0).epsilon(1e-12));
}

TEST_CASE("tail-decay perturbation bound: exponent isolated from the additive term") {
  PerturbInput in;
  in.a = 0.2;
  in.b = 1.0;
  in.n = 3;
  in.C = 2.0;
  auto leading = [&in](double tau) {
    PerturbInput t = in;
    t.tau = tau;
    const double v = t.b * t.b + tau * tau;
    const double d = 5.0 + 7.0 * std::abs(t.a) / std::sqrt(t.a * t.a + 2.0 * v);
    return perturb_bound(Perturb::k_tail, t).value - d * tau * tau / v;
  };
  const double r = 2.0, tau = 1e-7;
  const double ratio = leading(tau / r) / leading(tau);
  CHECK(ratio == doctest::Approx(std::pow(r, -3.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("evaluators are monotone in the leading small parameter") {
  GeoInput gin;
  gin.a = 0.4;
  gin.sigma2 = 1.0;
  gin.rho3 = 1.2;
  gin.rho_k2 = 1.5;
  gin.k = 2;
  gin.raw4_x1 = 1.5;
  gin.abs3_x1 = 1.2;
  gin.sup_inv_dist = 2.0;
  double prev_w = kInf, prev_k = kInf, prev_m = kInf;
  for (double p : {0.2, 0.02, 0.002, 0.0002}) {
    gin.p = p;
    CHECK(geo_bound(Geo::w, gin).value <= prev_w);
    CHECK(geo_bound(Geo::k_inverse, gin).value <= prev_k);
    CHECK(geo_bound(Geo::k_moment, gin).value <= prev_m);
    prev_w = geo_bound(Geo::w, gin).value;
    prev_k = geo_bound(Geo::k_inverse, gin).value;
    prev_m = geo_bound(Geo::k_moment, gin).value;
  }
  PerturbInput pin;
  pin.a = 0.4;
  pin.b = 1.0;
  double prev = kInf;
  for (double tau : {0.5, 0.05, 0.005}) {
    pin.tau = tau;
    CHECK(perturb_bound(Perturb::k_normal, pin).value <= prev);
    prev = perturb_bound(Perturb::k_normal, pin).value;
  }
  RandStdInput rin;
  rin.sigma = 1.0;
  rin.a = 0.3;
  prev = kInf;
  for (int n : {10, 100, 1000, 10000}) {
    rin.n = n;
    rin.sum_abs3 = n * 1.2;
    CHECK(randstd_bound(RandStd::k, rin).value <= prev);
    prev = randstd_bound(RandStd::k, rin).value;
  }
}

TEST_CASE("hypothesis boundaries reject exactly the excluded parameter sets") {
  // sigma^2 = p a^2 boundary
  GeoInput gin;
  gin.p = 0.5;
  gin.a = std::sqrt(2.0);
  gin.sigma2 = 1.0;  // sigma^2 == p a^2
  gin.sup_inv_dist = 1.0;
  CHECK_THROWS_AS(geo_bound(Geo::k_inverse, gin), hypothesis_error);
  CHECK(std::isinf(geo_bound(Geo::k_inverse, gin, true).value));
  // but the moment variant drops the condition
  gin.k = 1;
  gin.rho_k2 = 2.0;
  CHECK_NOTHROW(geo_bound(Geo::k_moment, gin));

  // tau = 1 excluded for the normal-noise Kolmogorov form
  PerturbInput pin;
  pin.tau = 1.0;
  CHECK_THROWS_AS(perturb_bound(Perturb::k_normal, pin), hypothesis_error);
  pin.tau = 0.999;
  CHECK_NOTHROW(perturb_bound(Perturb::k_normal, pin));

  // n = 1 excluded for the random-standardisation forms
  RandStdInput rin;
  rin.n = 1;
  rin.sum_abs3 = 1.0;
  CHECK_THROWS_AS(randstd_bound(RandStd::k, rin), hypothesis_error);

  // k = 0 excluded for the moment forms
  BoundInput bin;
  bin.sigma2 = 1.0;
  bin.k = 0;
  bin.moment_diff_k = 0.1;
  CHECK_THROWS_AS(thm35_bound(Thm35::k_moment, bin), hypothesis_error);

  // soft mode reports instead of throwing
  const auto soft = randstd_bound(RandStd::k, rin, true);
  CHECK(std::isinf(soft.value));
  CHECK_FALSE(soft.hypotheses_ok());
}

TEST_CASE("constants citation table is pinned") {
  const auto table = bound_constants_table();
  REQUIRE(table.size() == 19);
  using V = std::vector<double>;
  CHECK(table.at("3.51") == V{14.0, 7.0, 5.0, 7.0});
  CHECK(table.at("3.52") == V{2.0, 4.0, 2.0, 4.0});
  CHECK(table.at("kolb") == V{14.0, 7.0, 5.0, 7.0});
  CHECK(table.at("3.53") == V{2.0});
  CHECK(table.at("3.54") == V{1.0, 2.0});
  CHECK(table.at("3.55") == V{2.0, 4.0});
  CHECK(table.at("4.1k1") == V{1.05, 14.0, 7.0, 5.0, 7.0});
  CHECK(table.at("dddw")[0] == doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846))
                                   .epsilon(1e-15));
  CHECK(table.at("kb") == V{14.0, 7.0});
  CHECK(table.at("4.14") == V{4.0, 14.0, 7.0, 5.0, 7.0});
  CHECK(table.at("wb") == V{2.0, 8.0, 3.0, 3.0});
  CHECK(table.at("4.13")[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(table.at("5.11") == V{0.56, 5.0});
  CHECK(table.at("5.12")[0] == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-15));
  CHECK(table.at("5.12")[1] == 9.168);
  CHECK(table.at("5.13") == V{3.0, 9.168, 2.0});
}

TEST_CASE("bound_by_id: dispatch and the id list") {
  const auto ids = bound_formula_ids();
  CHECK(ids.size() == 19);
  for (const auto& id : ids) {
    // soft mode with generic inputs never throws
    std::map<std::string, double> params = {
        {"a", 0.2},   {"sigma2", 1.0}, {"beta", 0.1},     {"tail_prob", 0.01},
        {"mean_abs_diff", 0.1}, {"mean_sq_diff", 0.01},   {"mean_cond_diff", 0.01},
        {"moment_diff_k", 0.1}, {"k", 1},  {"b", 1.0},    {"tau", 0.1},
        {"n", 10},    {"C", 1.0},      {"p", 0.1},        {"rho3", 1.0},
        {"rho_k2", 1.5}, {"abs3_x1", 1.0}, {"raw3_x1", 0.0}, {"raw4_x1", 1.0},
        {"sup_inv_dist", 2.0}, {"sigma", 1.0}, {"sum_abs3", 10.0}, {"sum_kurt", 40.0}};
    const auto bv = bound_by_id(id, params, true);
    CHECK(bv.formula_id == id);
    CHECK(bv.value >= 0.0);
  }
  CHECK_THROWS_AS(bound_by_id("nope", {}, true), std::invalid_argument);
}

TEST_CASE("sup_inverse_distance: Rademacher quantile gap is 1") {
  // Y Rademacher: Y^A triangular; the largest quantile gap sits at u = 1/2
  const auto y = rademacher();
  EquilibriumView view(y);
  const double sup = sup_inverse_distance(y, view);
  CHECK(sup == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sup <= 2.0);  // the cheap 2C cap for C-bounded summands
}
