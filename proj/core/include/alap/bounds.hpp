#pragma once

#include <map>
#include <string>
#include <vector>

namespace alap {

/// One evaluated inequality: the value, the equation tag it came from, and the
/// per-hypothesis check results. In soft mode a failed hypothesis yields
/// +infinity instead of a hypothesis_error.
struct BoundValue {
  double value = 0.0;
  std::string formula_id;
  std::vector<std::pair<std::string, bool>> hypothesis_report;
  bool hypotheses_ok() const {
    for (const auto& [name, ok] : hypothesis_report)
      if (!ok) return false;
    return true;
  }
};

/// Inputs shared by the general-transformation bounds. Only the fields a
/// formula uses are read.
struct BoundInput {
  double a = 0.0;
  double sigma2 = 1.0;        // variance of W
  double beta = 0.0;          // smoothing parameter of the beta-forms
  double tail_prob = 0.0;     // P(|W - W^A| > beta)
  double mean_abs_diff = 0.0; // E|W - W^A|
  double mean_sq_diff = 0.0;  // E[(W - W^A)^2]
  double mean_cond_diff = 0.0;// E|E[W - W^A | W]|
  double moment_diff_k = 0.0; // E[|W - W^A|^k]
  int k = 1;
};

enum class Thm35 { k_beta, k_beta_wa, k_moment, w, w_wa, k_wa_mean, d2 };
BoundValue thm35_bound(Thm35 which, const BoundInput& in, bool soft = false);

enum class Perturb { k_chebyshev, w, k_tail, k_normal, w_normal };
struct PerturbInput {
  double a = 0.0;
  double b = 1.0;
  double tau = 0.1;
  int n = 2;        // tail-decay exponent of part (ii)
  double C = 1.0;   // tail-decay constant of part (ii)
};
BoundValue perturb_bound(Perturb which, const PerturbInput& in, bool soft = false);

enum class Geo { k_inverse, k_moment, w, d2 };
struct GeoInput {
  double p = 0.1;
  double a = 0.0;
  double sigma2 = 1.0;
  double rho3 = 0.0;          // sup_i E|X_i|^3
  double rho_k2 = 0.0;        // sup_i E|X_i|^{k+2}
  int k = 1;
  double abs3_x1 = 0.0;       // E|X_1|^3 (iid case)
  double raw3_x1 = 0.0;       // E[X_1^3] (iid case; (4.13) requires zero)
  double raw4_x1 = 0.0;       // E[X_1^4] (iid case)
  double sup_inv_dist = 0.0;  // sup_i || F^{-1}_{Y_i} - F^{-1}_{Y_i^A} ||
};
BoundValue geo_bound(Geo which, const GeoInput& in, bool soft = false);

enum class RandStd { k, w, d12 };
struct RandStdInput {
  int n = 2;
  double sigma = 1.0;
  double a = 0.0;
  double sum_abs3 = 0.0;      // sum_i E|X_i|^3
  double sum_kurt = 0.0;      // sum_i (3 + E[X_i^4]/sigma^4)
};
BoundValue randstd_bound(RandStd which, const RandStdInput& in, bool soft = false);

/// Grid-sup of |F^{-1}_Y(u) - F^{-1}_{Y^A}(u)| over 513 Chebyshev-spaced
/// points in (0,1), endpoint-refined and with the cdf jump levels of a
/// discrete Y inserted.
struct BaseDistribution;
class EquilibriumView;
double sup_inverse_distance(const BaseDistribution& y, const EquilibriumView& ya);

/// Generic entry point for the CLI: formula id -> evaluator over named params.
BoundValue bound_by_id(const std::string& formula_id,
                       const std::map<std::string, double>& params, bool soft = false);
std::vector<std::string> bound_formula_ids();

/// The hard-coded constants of every implemented inequality, keyed by formula
/// id; pinned by a citation-table test so a silent edit of one literal fails
/// loudly.
std::map<std::string, std::vector<double>> bound_constants_table();

}  // namespace alap
