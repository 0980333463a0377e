#include "alap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "alap/base_distribution.hpp"
#include "alap/equilibrium.hpp"
#include "alap/errors.hpp"

namespace alap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Constants as they appear in the displayed inequalities. The citation-table
// test pins these; evaluators must reference them, never re-type literals.
namespace cst {
constexpr double k351[] = {14.0, 7.0, 5.0, 7.0};
constexpr double k352[] = {2.0, 4.0, 2.0, 4.0};
constexpr double kolb[] = {14.0, 7.0, 5.0, 7.0};
constexpr double w353[] = {2.0};
constexpr double w354[] = {1.0, 2.0};
constexpr double k355[] = {2.0, 4.0};
constexpr double d356[] = {1.0, 1.0};
constexpr double pk1[] = {1.05, 14.0, 7.0, 5.0, 7.0};
constexpr double pw1[] = {1.0, 1.0};
constexpr double pk2[] = {2.0, 2.0};
constexpr double pk3[] = {2.0, 2.0};
constexpr double pwn[] = {0.79788456080286535588, 1.0};  // sqrt(2/pi)
constexpr double gkb[] = {14.0, 7.0};
constexpr double g414[] = {4.0, 14.0, 7.0, 5.0, 7.0};
constexpr double gwb[] = {2.0, 8.0, 3.0, 3.0};
constexpr double g413[] = {1.4142135623730950488, 2.0, 2.0, 3.0, 6.0};  // sqrt(2)
constexpr double r511[] = {0.56, 5.0};
constexpr double r512[] = {0.94280904158206336587, 9.168, 2.0};  // 2 sqrt(2)/3
constexpr double r513[] = {3.0, 9.168, 2.0};
}  // namespace cst

struct HypChecker {
  BoundValue* out;
  bool soft;
  bool failed = false;
  void require(const std::string& name, bool ok) {
    out->hypothesis_report.emplace_back(name, ok);
    if (!ok) {
      if (!soft) throw hypothesis_error("hypothesis failed: " + name);
      failed = true;
    }
  }
};

}  // namespace

BoundValue thm35_bound(Thm35 which, const BoundInput& in, bool soft) {
  BoundValue out;
  HypChecker hyp{&out, soft};
  const double a = in.a, s2 = in.sigma2;
  hyp.require("sigma^2 > a^2", s2 > a * a);
  const double root = std::sqrt(2.0 * s2 - a * a);
  const double gap = s2 - a * a;
  switch (which) {
    case Thm35::k_beta:
      out.formula_id = "3.51";
      hyp.require("beta > 0", in.beta > 0.0);
      if (!hyp.failed)
        out.value = (cst::k351[0] / root + cst::k351[1] * std::abs(a) / gap) * in.beta +
                    (cst::k351[2] + cst::k351[3] * std::abs(a) / root) * in.tail_prob;
      break;
    case Thm35::k_beta_wa:
      out.formula_id = "3.52";
      hyp.require("beta > 0", in.beta > 0.0);
      if (!hyp.failed)
        out.value = (cst::k352[0] / root + cst::k352[1] * std::abs(a) / gap) * in.beta +
                    (cst::k352[2] + cst::k352[3] * std::abs(a) / root) * in.tail_prob;
      break;
    case Thm35::k_moment: {
      out.formula_id = "kolb";
      hyp.require("k >= 1", in.k >= 1);
      hyp.require("E|W - W^A|^k finite", std::isfinite(in.moment_diff_k));
      if (!hyp.failed) {
        const double k = in.k;
        const double lead = cst::kolb[0] / root + cst::kolb[1] * std::abs(a) / gap;
        const double inner = (k + std::pow(k, -k)) *
                             (cst::kolb[2] + cst::kolb[3] * std::abs(a) / root) *
                             in.moment_diff_k;
        out.value = std::pow(lead, k / (k + 1.0)) * std::pow(inner, 1.0 / (k + 1.0));
      }
      break;
    }
    case Thm35::w:
      out.formula_id = "3.53";
      if (!hyp.failed) out.value = cst::w353[0] * in.mean_abs_diff;
      break;
    case Thm35::w_wa:
      out.formula_id = "3.54";
      if (!hyp.failed) out.value = (cst::w354[0] + cst::w354[1] / root) * in.mean_abs_diff;
      break;
    case Thm35::k_wa_mean:
      out.formula_id = "3.55";
      if (!hyp.failed) out.value = (cst::k355[0] / root + cst::k355[1] / gap) * in.mean_abs_diff;
      break;
    case Thm35::d2:
      out.formula_id = "3.56";
      if (!hyp.failed)
        out.value = cst::d356[0] * (gap / root) * in.mean_cond_diff +
                    cst::d356[1] * in.mean_sq_diff;
      break;
  }
  if (hyp.failed) out.value = kInf;
  return out;
}

BoundValue perturb_bound(Perturb which, const PerturbInput& in, bool soft) {
  BoundValue out;
  HypChecker hyp{&out, soft};
  const double a = in.a, b = in.b, tau = in.tau;
  hyp.require("b > 0", b > 0.0);
  hyp.require("tau > 0", tau > 0.0);
  const double v = b * b + tau * tau;
  const double c = cst::pk1[1] / std::sqrt(a * a + 2.0 * v) + cst::pk1[2] * std::abs(a) / v;
  const double d = cst::pk1[3] + cst::pk1[4] * std::abs(a) / std::sqrt(a * a + 2.0 * v);
  switch (which) {
    case Perturb::k_chebyshev:
      out.formula_id = "4.1k1";
      if (!hyp.failed)
        out.value = cst::pk1[0] * std::cbrt(b * b * c * c * d * tau * tau / v) + d * tau * tau / v;
      break;
    case Perturb::w:
      out.formula_id = "4.1w1";
      if (!hyp.failed)
        out.value = cst::pw1[0] * tau +
                    cst::pw1[1] * tau * tau / std::sqrt(2.0 * b * b + a * a);
      break;
    case Perturb::k_tail: {
      out.formula_id = "4.1k2";
      hyp.require("n >= 2", in.n >= 2);
      hyp.require("C > 0", in.C > 0.0);
      if (!hyp.failed) {
        const double n = in.n;
        const double inner = cst::pk2[1] * b * b * std::pow(c, n) * in.C * d *
                             std::pow(tau, n) / (v * (n * n + 3.0 * n + 2.0));
        out.value = cst::pk2[0] * std::pow(inner, 1.0 / (n + 1.0)) + d * tau * tau / v;
      }
      break;
    }
    case Perturb::k_normal: {
      out.formula_id = "4.1k3";
      hyp.require("0 < tau < 1", tau < 1.0);
      if (!hyp.failed) {
        const double lg = std::log(1.0 / tau);
        out.value = (cst::pk3[0] * c +
                     b * b * d / (cst::pk3[1] * std::sqrt(2.0 * 3.14159265358979323846) * v * lg)) *
                        tau * std::sqrt(lg) +
                    d * tau * tau / v;
      }
      break;
    }
    case Perturb::w_normal:
      out.formula_id = "dddw";
      if (!hyp.failed)
        out.value = cst::pwn[0] * tau +
                    cst::pwn[1] * tau * tau / std::sqrt(2.0 * b * b + a * a);
      break;
  }
  if (hyp.failed) out.value = kInf;
  return out;
}

BoundValue geo_bound(Geo which, const GeoInput& in, bool soft) {
  BoundValue out;
  HypChecker hyp{&out, soft};
  const double p = in.p, a = in.a, s2 = in.sigma2;
  const double sig = std::sqrt(s2);
  hyp.require("p in (0,1)", p > 0.0 && p < 1.0);
  const double root = std::sqrt(2.0 * s2 + a * a);
  switch (which) {
    case Geo::k_inverse:
      out.formula_id = "kb";
      hyp.require("sigma^2 > p a^2", s2 > p * a * a);
      if (!hyp.failed)
        out.value = std::sqrt(p) * (cst::gkb[0] / root + cst::gkb[1] * std::abs(a) / s2) *
                    in.sup_inv_dist;
      break;
    case Geo::k_moment: {
      out.formula_id = "4.14";
      hyp.require("k >= 1", in.k >= 1);
      hyp.require("rho_{k+2} finite", std::isfinite(in.rho_k2) && in.rho_k2 > 0.0);
      if (!hyp.failed) {
        const double k = in.k;
        const double lead = cst::g414[1] / root + cst::g414[2] * std::abs(a) / s2;
        const double inner = (k + std::pow(k, -k)) *
                             (cst::g414[3] + cst::g414[4] * std::abs(a) / root) * in.rho_k2 / s2;
        out.value = cst::g414[0] * std::pow(p, k / (2.0 * (k + 1.0))) *
                    std::pow(lead, k / (k + 1.0)) * std::pow(inner, 1.0 / (k + 1.0));
      }
      break;
    }
    case Geo::w:
      out.formula_id = "wb";
      hyp.require("rho_3 finite", std::isfinite(in.rho3) && in.rho3 > 0.0);
      if (!hyp.failed) {
        const double cube = std::abs(a) * std::abs(a) * std::abs(a);
        out.value = cst::gwb[0] * std::sqrt(p) *
                    (std::sqrt(s2 + a * a) +
                     cst::gwb[1] * (1.0 + cst::gwb[3] * std::sqrt(p) * std::abs(a) / sig) *
                         (in.rho3 + cube) / (cst::gwb[2] * s2));
      }
      break;
    case Geo::d2: {
      out.formula_id = "4.13";
      hyp.require("sigma^2 > p a^2", s2 > p * a * a);
      hyp.require("E[X1^3] = 0", std::abs(in.raw3_x1) <= 1e-12);
      hyp.require("E[X1^4] finite", std::isfinite(in.raw4_x1) && in.raw4_x1 > 0.0);
      if (!hyp.failed) {
        const double cube = std::abs(a) * std::abs(a) * std::abs(a);
        const double gapp = s2 - p * a * a;
        out.value =
            p * (s2 / root *
                     (cst::g413[0] * sig / (1.0 - p) +
                      sig * std::sqrt(p) * std::log(1.0 / p) / (1.0 - p) *
                          (cst::g413[1] + in.abs3_x1 / (sig * sig * sig)) +
                      std::abs(a) + cst::g413[2] * p * cube / (cst::g413[3] * gapp)) +
                 s2 + p * a * a + in.raw4_x1 / (cst::g413[4] * gapp));
      }
      break;
    }
  }
  if (hyp.failed) out.value = kInf;
  return out;
}

BoundValue randstd_bound(RandStd which, const RandStdInput& in, bool soft) {
  BoundValue out;
  HypChecker hyp{&out, soft};
  hyp.require("n >= 2", in.n >= 2);
  hyp.require("sigma > 0", in.sigma > 0.0);
  const double n = in.n, s = in.sigma;
  switch (which) {
    case RandStd::k:
      out.formula_id = "5.11";
      if (!hyp.failed)
        out.value = cst::r511[0] / (s * s * s * std::pow(n, 1.5)) * in.sum_abs3 +
                    cst::r511[1] / n;
      break;
    case RandStd::w:
      out.formula_id = "5.12";
      if (!hyp.failed)
        out.value = cst::r512[0] / (s * s * std::pow(n, 1.5)) * in.sum_abs3 +
                    cst::r512[1] * s / n + cst::r512[2] * std::abs(in.a) / (n + 1.0);
      break;
    case RandStd::d12:
      out.formula_id = "5.13";
      if (!hyp.failed)
        out.value = s * s / (cst::r513[0] * n * n) * in.sum_kurt + cst::r513[1] * s / n +
                    cst::r513[2] * std::abs(in.a) / (n + 1.0);
      break;
  }
  if (hyp.failed) out.value = kInf;
  return out;
}

double sup_inverse_distance(const BaseDistribution& y, const EquilibriumView& ya) {
  std::vector<double> us;
  const int n = 513;
  for (int j = 0; j <= n - 1; ++j) {
    const double u = 0.5 * (1.0 + std::cos(3.14159265358979323846 * j / (n - 1.0)));
    us.push_back(std::clamp(u, 1e-9, 1.0 - 1e-9));
  }
  // endpoint refinement and the jump levels of a discrete Y
  for (double e : {1e-9, 1e-6, 1e-4}) {
    us.push_back(e);
    us.push_back(1.0 - e);
  }
  if (!y.atoms.empty()) {
    double cum = 0.0;
    for (const Atom& at : y.atoms) {
      cum += at.mass;
      if (cum > 1e-9 && cum < 1.0 - 1e-9) {
        us.push_back(cum - 1e-9);
        us.push_back(cum + 1e-9);
      }
    }
  }
  double sup = 0.0;
  for (double u : us) sup = std::max(sup, std::abs(y.quantile(u) - ya.quantile(u)));
  return sup;
}

BoundValue bound_by_id(const std::string& id, const std::map<std::string, double>& params,
                       bool soft) {
  auto get = [&params](const std::string& k, double dflt) {
    auto it = params.find(k);
    return it == params.end() ? dflt : it->second;
  };
  auto geti = [&get](const std::string& k, int dflt) {
    return static_cast<int>(get(k, dflt));
  };

  if (id == "3.51" || id == "3.52" || id == "kolb" || id == "3.53" || id == "3.54" ||
      id == "3.55" || id == "3.56") {
    BoundInput in;
    in.a = get("a", 0.0);
    in.sigma2 = get("sigma2", 1.0);
    in.beta = get("beta", 0.0);
    in.tail_prob = get("tail_prob", 0.0);
    in.mean_abs_diff = get("mean_abs_diff", 0.0);
    in.mean_sq_diff = get("mean_sq_diff", 0.0);
    in.mean_cond_diff = get("mean_cond_diff", 0.0);
    in.moment_diff_k = get("moment_diff_k", 0.0);
    in.k = geti("k", 1);
    Thm35 w = Thm35::k_beta;
    if (id == "3.52") w = Thm35::k_beta_wa;
    if (id == "kolb") w = Thm35::k_moment;
    if (id == "3.53") w = Thm35::w;
    if (id == "3.54") w = Thm35::w_wa;
    if (id == "3.55") w = Thm35::k_wa_mean;
    if (id == "3.56") w = Thm35::d2;
    return thm35_bound(w, in, soft);
  }
  if (id == "4.1k1" || id == "4.1w1" || id == "4.1k2" || id == "4.1k3" || id == "dddw") {
    PerturbInput in;
    in.a = get("a", 0.0);
    in.b = get("b", 1.0);
    in.tau = get("tau", 0.1);
    in.n = geti("n", 2);
    in.C = get("C", 1.0);
    Perturb w = Perturb::k_chebyshev;
    if (id == "4.1w1") w = Perturb::w;
    if (id == "4.1k2") w = Perturb::k_tail;
    if (id == "4.1k3") w = Perturb::k_normal;
    if (id == "dddw") w = Perturb::w_normal;
    return perturb_bound(w, in, soft);
  }
  if (id == "kb" || id == "4.14" || id == "wb" || id == "4.13") {
    GeoInput in;
    in.p = get("p", 0.1);
    in.a = get("a", 0.0);
    in.sigma2 = get("sigma2", 1.0);
    in.rho3 = get("rho3", 0.0);
    in.rho_k2 = get("rho_k2", 0.0);
    in.k = geti("k", 1);
    in.abs3_x1 = get("abs3_x1", 0.0);
    in.raw3_x1 = get("raw3_x1", 0.0);
    in.raw4_x1 = get("raw4_x1", 0.0);
    in.sup_inv_dist = get("sup_inv_dist", 0.0);
    Geo w = Geo::k_inverse;
    if (id == "4.14") w = Geo::k_moment;
    if (id == "wb") w = Geo::w;
    if (id == "4.13") w = Geo::d2;
    return geo_bound(w, in, soft);
  }
  if (id == "5.11" || id == "5.12" || id == "5.13") {
    RandStdInput in;
    in.n = geti("n", 2);
    in.sigma = get("sigma", 1.0);
    in.a = get("a", 0.0);
    in.sum_abs3 = get("sum_abs3", 0.0);
    in.sum_kurt = get("sum_kurt", 0.0);
    RandStd w = RandStd::k;
    if (id == "5.12") w = RandStd::w;
    if (id == "5.13") w = RandStd::d12;
    return randstd_bound(w, in, soft);
  }
  throw std::invalid_argument("bound_by_id: unknown formula id '" + id + "'");
}

std::vector<std::string> bound_formula_ids() {
  return {"3.51", "3.52", "kolb", "3.53", "3.54", "3.55", "3.56", "4.1k1", "4.1w1",
          "4.1k2", "4.1k3", "dddw", "kb",   "4.14", "wb",   "4.13", "5.11", "5.12", "5.13"};
}

std::map<std::string, std::vector<double>> bound_constants_table() {
  auto vec = [](const double* p, std::size_t n) { return std::vector<double>(p, p + n); };
  return {
      {"3.51", vec(cst::k351, 4)},  {"3.52", vec(cst::k352, 4)}, {"kolb", vec(cst::kolb, 4)},
      {"3.53", vec(cst::w353, 1)},  {"3.54", vec(cst::w354, 2)}, {"3.55", vec(cst::k355, 2)},
      {"3.56", vec(cst::d356, 2)},  {"4.1k1", vec(cst::pk1, 5)}, {"4.1w1", vec(cst::pw1, 2)},
      {"4.1k2", vec(cst::pk2, 2)},  {"4.1k3", vec(cst::pk3, 2)}, {"dddw", vec(cst::pwn, 2)},
      {"kb", vec(cst::gkb, 2)},     {"4.14", vec(cst::g414, 5)}, {"wb", vec(cst::gwb, 4)},
      {"4.13", vec(cst::g413, 5)},  {"5.11", vec(cst::r511, 2)}, {"5.12", vec(cst::r512, 3)},
      {"5.13", vec(cst::r513, 3)},
  };
}

}  // namespace alap
