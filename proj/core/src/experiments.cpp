#include "alap/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "alap/al.hpp"
#include "alap/base_distribution.hpp"
#include "alap/bounds.hpp"
#include "alap/equilibrium.hpp"
#include "alap/errors.hpp"
#include "alap/metrics.hpp"
#include "alap/rng.hpp"

namespace alap {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  // shortest representation that round-trips exactly
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// sum of n Rademacher signs; 64 draws per generator word
double rademacher_sum(Rng& rng, std::uint64_t n) {
  std::int64_t s = 0;
  while (n >= 64) {
    s += 2 * static_cast<std::int64_t>(std::popcount(rng.next_u64())) - 64;
    n -= 64;
  }
  if (n > 0) {
    const std::uint64_t w = rng.next_u64() & ((1ULL << n) - 1);
    s += 2 * static_cast<std::int64_t>(std::popcount(w)) - static_cast<std::int64_t>(n);
  }
  return static_cast<double>(s);
}

struct Cell {
  std::size_t index;
  double a = 0.0;
  double p = 0.0, tau = 0.0;
  int n = 0;
};

struct MetricRow {
  std::string metric;
  double value;
  double radius;
};

// one experiment cell: simulate, estimate requested metrics, attach bounds
template <typename Simulate, typename BoundsFor>
std::vector<BoundReport> run_cell(const ExperimentConfig& cfg, const Cell& cell,
                                  const std::string& params_json, const ALParams& ref,
                                  Simulate&& simulate, BoundsFor&& bounds_for) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(cfg.seed ^ Rng::mix(cell.index), 0);
  std::vector<double> w(cfg.samples_per_cell);
  simulate(rng, w);
  std::sort(w.begin(), w.end());

  const Reference reference = make_reference(ref);
  std::vector<MetricRow> rows;
  for (const std::string& m : cfg.metrics) {
    if (m == "ks") {
      const auto est = empirical_kolmogorov(w, reference);
      rows.push_back({m, est.value, est.confidence_radius});
    } else if (m == "w1") {
      const auto est = empirical_wasserstein(w, reference);
      const double rad = bootstrap_radius_w1(w, reference, rng);
      rows.push_back({m, est.value, rad});
    } else if (m == "d2lb" || m == "d12lb") {
      const auto cls = m == "d2lb" ? SmoothClass::d2 : SmoothClass::d12;
      const auto est = smooth_lower_bound(w, ref, cls);
      const double rad = bootstrap_radius_smooth(w, ref, cls, rng);
      rows.push_back({m, est.value, rad});
    } else {
      throw std::invalid_argument("unknown metric '" + m + "'");
    }
  }

  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  std::vector<BoundReport> out;
  for (const MetricRow& r : rows) {
    for (const BoundValue& bv : bounds_for(r.metric)) {
      BoundReport rep;
      rep.cell_index = cell.index;
      rep.scenario = cfg.scenario;
      rep.cell_params = params_json;
      rep.metric = r.metric;
      rep.n_samples = cfg.samples_per_cell;
      rep.empirical = r.value;
      rep.conf_radius = r.radius;
      rep.bound_formula = bv.formula_id;
      rep.bound_value = bv.value;
      rep.ratio = std::isfinite(bv.value) && bv.value > 0.0 ? r.value / bv.value : 0.0;
      rep.wall_ms = ms;
      out.push_back(std::move(rep));
    }
  }
  return out;
}

std::vector<BoundReport> run_cells(const ExperimentConfig& cfg, std::size_t ncells,
                                   const std::function<std::vector<BoundReport>(std::size_t)>& fn) {
  std::vector<std::vector<BoundReport>> per_cell(ncells);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads =
      std::min<unsigned>(cfg.threads > 0 ? cfg.threads : hw, static_cast<unsigned>(ncells));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string error_text;
  std::mutex error_mu;
  for (unsigned t = 0; t < nthreads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= ncells || failed.load()) return;
        try {
          per_cell[i] = fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mu);
          error_text = e.what();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load()) throw numeric_error("experiment cell failed: " + error_text);
  std::vector<BoundReport> out;
  for (auto& rows : per_cell)
    for (auto& r : rows) out.push_back(std::move(r));
  return out;
}

}  // namespace

std::vector<BoundReport> run_geometric(const ExperimentConfig& cfg) {
  const BaseDistribution base = parse_base(cfg.base);
  if (std::abs(base.mean) > 1e-12)
    throw std::domain_error("run_geometric: X base must have mean zero");
  const double s2 = base.variance;
  const double sigma = std::sqrt(s2);
  const bool fast_rademacher = base.name == "rademacher";

  std::vector<Cell> cells;
  std::size_t idx = 0;
  for (double a : cfg.a_list)
    for (double p : cfg.p_list) cells.push_back({idx++, a, p, 0.0, 0});

  return run_cells(cfg, cells.size(), [&](std::size_t i) {
    const Cell& cell = cells[i];
    const double p = cell.p, a = cell.a;
    std::ostringstream js;
    js << "{\"a\":" << fmt(a) << ",\"p\":" << fmt(p) << "}";
    const ALParams ref(0.0, a, sigma);
    const double rp = std::sqrt(p);

    // (kb) needs the quantile gap between Y and Y^A; hypothesis-invalid cells
    // get +inf through soft evaluation instead
    GeoInput gin;
    gin.p = p;
    gin.a = a;
    gin.sigma2 = s2;
    gin.rho3 = base.abs_moment(3);
    gin.k = 2;
    gin.rho_k2 = base.abs_moment(4);
    gin.abs3_x1 = base.abs_moment(3);
    gin.raw3_x1 = base.raw_moment(3);
    gin.raw4_x1 = base.raw_moment(4);
    gin.sup_inv_dist = 0.0;
    if (s2 > p * a * a) {
      const BaseDistribution y = shift(base, rp * a);
      const auto view = equilibrium_view_cached(y);
      gin.sup_inv_dist = sup_inverse_distance(y, *view);
    }

    auto simulate = [&](Rng& rng, std::vector<double>& w) {
      for (double& v : w) {
        const std::uint64_t n = rng.geometric(p);
        double s;
        if (fast_rademacher) {
          s = rademacher_sum(rng, n);
        } else {
          s = 0.0;
          for (std::uint64_t j = 0; j < n; ++j) s += base.sample(rng);
        }
        v = rp * s + p * a * static_cast<double>(n);
      }
    };
    auto bounds_for = [&](const std::string& m) {
      std::vector<BoundValue> bs;
      if (m == "ks") {
        bs.push_back(geo_bound(Geo::k_inverse, gin, true));
        bs.push_back(geo_bound(Geo::k_moment, gin, true));
      } else if (m == "w1") {
        bs.push_back(geo_bound(Geo::w, gin, true));
      } else if (m == "d2lb") {
        bs.push_back(geo_bound(Geo::d2, gin, true));
      }
      return bs;
    };
    return run_cell(cfg, cell, js.str(), ref, simulate, bounds_for);
  });
}

std::vector<BoundReport> run_perturbation(const ExperimentConfig& cfg) {
  const double b = cfg.b;
  const bool normal_noise = cfg.noise == "normal";

  std::vector<Cell> cells;
  std::size_t idx = 0;
  for (double a : cfg.a_list)
    for (double tau : cfg.tau_list) cells.push_back({idx++, a, 0.0, tau, 0});

  return run_cells(cfg, cells.size(), [&](std::size_t i) {
    const Cell& cell = cells[i];
    const double tau = cell.tau, a = cell.a;
    std::ostringstream js;
    js << "{\"a\":" << fmt(a) << ",\"tau\":" << fmt(tau) << "}";
    const ALParams zprime(0.0, a, b);
    const ALParams ref(0.0, a, std::sqrt(b * b + tau * tau));

    PerturbInput pin;
    pin.a = a;
    pin.b = b;
    pin.tau = tau;
    pin.n = 2;   // Chebyshev tail decay holds for any mean-zero noise
    pin.C = 1.0;

    auto simulate = [&](Rng& rng, std::vector<double>& w) {
      const double u_half = std::sqrt(3.0) * tau;
      for (double& v : w) {
        double eta;
        if (normal_noise)
          eta = tau * rng.normal();
        else if (cfg.noise == "uniform")
          eta = u_half * (2.0 * rng.uniform() - 1.0);
        else
          eta = rng.uniform() < 0.5 ? -tau : tau;  // twopoint
        v = al_sample(zprime, rng) + eta;
      }
    };
    auto bounds_for = [&](const std::string& m) {
      std::vector<BoundValue> bs;
      if (m == "ks") {
        bs.push_back(perturb_bound(Perturb::k_chebyshev, pin, true));
        bs.push_back(perturb_bound(Perturb::k_tail, pin, true));
        if (normal_noise) bs.push_back(perturb_bound(Perturb::k_normal, pin, true));
      } else if (m == "w1") {
        bs.push_back(perturb_bound(Perturb::w, pin, true));
        if (normal_noise) bs.push_back(perturb_bound(Perturb::w_normal, pin, true));
      }
      return bs;
    };
    return run_cell(cfg, cell, js.str(), ref, simulate, bounds_for);
  });
}

std::vector<BoundReport> run_randstd(const ExperimentConfig& cfg) {
  const BaseDistribution base = parse_base(cfg.base);
  if (std::abs(base.mean) > 1e-12)
    throw std::domain_error("run_randstd: X base must have mean zero");
  const double sigma = std::sqrt(base.variance);
  const bool fast_rademacher = base.name == "rademacher";

  std::vector<Cell> cells;
  std::size_t idx = 0;
  for (double a : cfg.a_list)
    for (int n : cfg.n_list) cells.push_back({idx++, a, 0.0, 0.0, n});

  return run_cells(cfg, cells.size(), [&](std::size_t i) {
    const Cell& cell = cells[i];
    const int n = cell.n;
    const double a = cell.a;
    if (n < 2) throw hypothesis_error("run_randstd: n >= 2 required");
    std::ostringstream js;
    js << "{\"a\":" << fmt(a) << ",\"n\":" << n << "}";
    const ALParams ref(0.0, a, sigma);

    RandStdInput rin;
    rin.n = n;
    rin.sigma = sigma;
    rin.a = a;
    rin.sum_abs3 = n * base.abs_moment(3);
    rin.sum_kurt = n * (3.0 + base.raw_moment(4) / std::pow(sigma, 4));
    const bool third_moment_zero = std::abs(base.raw_moment(3)) <= 1e-12;

    auto simulate = [&](Rng& rng, std::vector<double>& w) {
      // W = U_n V_n + a U_n^2 with U_n = sqrt(n B_{n-1}):
      //   sqrt(B) * sum_i X_i + a n B,  B ~ Beta(1, n-1)
      const double inv = 1.0 / (n - 1.0);
      for (double& v : w) {
        const double bdraw = 1.0 - std::pow(1.0 - rng.uniform(), inv);
        double s;
        if (fast_rademacher) {
          s = rademacher_sum(rng, static_cast<std::uint64_t>(n));
        } else {
          s = 0.0;
          for (int j = 0; j < n; ++j) s += base.sample(rng);
        }
        v = std::sqrt(bdraw) * s + a * n * bdraw;
      }
    };
    auto bounds_for = [&](const std::string& m) {
      std::vector<BoundValue> bs;
      if (m == "ks") {
        bs.push_back(randstd_bound(RandStd::k, rin, true));
      } else if (m == "w1") {
        bs.push_back(randstd_bound(RandStd::w, rin, true));
      } else if (m == "d12lb") {
        BoundValue bv = randstd_bound(RandStd::d12, rin, true);
        bv.hypothesis_report.emplace_back("E[X1^3] = 0", third_moment_zero);
        if (!third_moment_zero) bv.value = kInf;
        bs.push_back(std::move(bv));
      }
      return bs;
    };
    return run_cell(cfg, cell, js.str(), ref, simulate, bounds_for);
  });
}

std::vector<BoundReport> run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (const char* env = std::getenv("ALAP_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
  if (cfg.scenario == "geometric") return run_geometric(cfg);
  if (cfg.scenario == "perturbation") return run_perturbation(cfg);
  if (cfg.scenario == "randstd") return run_randstd(cfg);
  throw std::invalid_argument("run_experiment: unknown scenario '" + cfg.scenario + "'");
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg;
  cfg.scenario = j.at("scenario").get<std::string>();
  if (j.contains("base")) cfg.base = j["base"].get<std::string>();
  if (j.contains("a_list")) cfg.a_list = j["a_list"].get<std::vector<double>>();
  if (j.contains("a")) cfg.a_list = {j["a"].get<double>()};
  if (j.contains("b")) cfg.b = j["b"].get<double>();
  if (j.contains("noise")) cfg.noise = j["noise"].get<std::string>();
  if (j.contains("p_list")) cfg.p_list = j["p_list"].get<std::vector<double>>();
  if (j.contains("tau_list")) cfg.tau_list = j["tau_list"].get<std::vector<double>>();
  if (j.contains("n_list")) cfg.n_list = j["n_list"].get<std::vector<int>>();
  if (j.contains("samples_per_cell"))
    cfg.samples_per_cell = j["samples_per_cell"].get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("metrics")) cfg.metrics = j["metrics"].get<std::vector<std::string>>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (j.contains("timing")) cfg.timing = j["timing"].get<bool>();
  if (cfg.samples_per_cell < 1000 &&
      !cfg.metrics.empty())
    throw std::invalid_argument("config: samples_per_cell must be >= 1000 for metric cells");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void write_csv(const std::vector<BoundReport>& rows_in, std::ostream& os, bool timing) {
  std::vector<BoundReport> rows = rows_in;
  std::stable_sort(rows.begin(), rows.end(), [](const BoundReport& a, const BoundReport& b) {
    if (a.cell_index != b.cell_index) return a.cell_index < b.cell_index;
    if (a.metric != b.metric) return a.metric < b.metric;
    return a.bound_formula < b.bound_formula;
  });
  os << "scenario,cell_params,metric,n_samples,empirical,conf_radius,bound_formula,bound_value,"
        "ratio,wall_ms\n";
  for (const BoundReport& r : rows) {
    std::string esc = "\"";
    for (char c : r.cell_params) {
      if (c == '"') esc += "\"\"";
      else esc += c;
    }
    esc += "\"";
    os << r.scenario << ',' << esc << ',' << r.metric << ',' << r.n_samples << ','
       << fmt(r.empirical) << ',' << fmt(r.conf_radius) << ',' << r.bound_formula << ','
       << fmt(r.bound_value) << ',' << fmt(r.ratio) << ',' << fmt(timing ? r.wall_ms : 0.0)
       << '\n';
  }
}

std::string csv_string(const std::vector<BoundReport>& rows, bool timing) {
  std::ostringstream ss;
  write_csv(rows, ss, timing);
  return ss.str();
}

bool all_within_bounds(const std::vector<BoundReport>& rows) {
  for (const BoundReport& r : rows) {
    if (!std::isfinite(r.bound_value)) continue;  // hypothesis-invalid cell
    if (r.empirical - r.conf_radius > r.bound_value) return false;
  }
  return true;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need matching arrays, size >= 2");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    num += dx * (std::log(y[i]) - my);
    den += dx * dx;
  }
  return num / den;
}

}  // namespace alap
