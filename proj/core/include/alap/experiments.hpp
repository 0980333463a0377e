#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace alap {

/// Grid study configuration (JSON, snake_case keys). One of p_list / tau_list /
/// n_list drives the grid depending on the scenario; a_list multiplies it.
struct ExperimentConfig {
  std::string scenario;  // geometric | perturbation | randstd
  std::string base = "rademacher";
  std::vector<double> a_list = {0.0};
  double b = 1.0;                  // perturbation: AL scale before noise
  std::string noise = "normal";    // perturbation: normal | uniform | twopoint
  std::vector<double> p_list;
  std::vector<double> tau_list;
  std::vector<int> n_list;
  std::size_t samples_per_cell = 1000000;
  std::uint64_t seed = 1;
  std::vector<std::string> metrics = {"ks", "w1"};
  std::string out;
  int threads = 0;    // 0 = hardware concurrency
  bool timing = false;  // write measured wall_ms (off: column is 0, byte-stable)
};

ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct BoundReport {
  std::size_t cell_index = 0;
  std::string scenario;
  std::string cell_params;  // compact JSON
  std::string metric;       // ks | w1 | d2lb | d12lb
  std::size_t n_samples = 0;
  double empirical = 0.0;
  double conf_radius = 0.0;
  std::string bound_formula;
  double bound_value = 0.0;  // +inf marks a hypothesis-invalid cell
  double ratio = 0.0;        // empirical / bound, recorded even when > 1
  double wall_ms = 0.0;
};

std::vector<BoundReport> run_geometric(const ExperimentConfig& cfg);
std::vector<BoundReport> run_perturbation(const ExperimentConfig& cfg);
std::vector<BoundReport> run_randstd(const ExperimentConfig& cfg);

/// Dispatch on cfg.scenario; applies the ALAP_SEED environment override.
std::vector<BoundReport> run_experiment(const ExperimentConfig& cfg);

/// Columns: scenario, cell_params, metric, n_samples, empirical, conf_radius,
/// bound_formula, bound_value, ratio, wall_ms. Rows are sorted by cell key.
void write_csv(const std::vector<BoundReport>& rows, std::ostream& os, bool timing = false);
std::string csv_string(const std::vector<BoundReport>& rows, bool timing = false);

/// True iff every hypothesis-valid row satisfies
/// empirical - conf_radius <= bound_value (the central acceptance property).
bool all_within_bounds(const std::vector<BoundReport>& rows);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace alap
