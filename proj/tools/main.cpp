#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "alap/al.hpp"
#include "alap/base_distribution.hpp"
#include "alap/bounds.hpp"
#include "alap/equilibrium.hpp"
#include "alap/experiments.hpp"
#include "alap/metrics.hpp"
#include "alap/rng.hpp"
#include "alap/selfcheck.hpp"
#include "alap/stein.hpp"

namespace {

void print_value(double v) { std::printf("%.17g\n", v); }

alap::TestFunction parse_test_function(const std::string& spec) {
  if (spec.rfind("indicator:", 0) == 0)
    return alap::indicator_test(std::stod(spec.substr(10)));
  if (spec == "sin") return alap::sin_test();
  if (spec == "gauss") return alap::gauss_test();
  if (spec == "linear") return alap::linear_test();
  throw CLI::ValidationError("--h", "expected indicator:z | sin | gauss | linear");
}

std::vector<double> read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--samples", "cannot open " + path);
  std::vector<double> xs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      xs.push_back(std::stod(line));
    } catch (const std::exception&) {
      if (!first) throw CLI::ValidationError("--samples", "non-numeric line: " + line);
      // header line tolerated
    }
    first = false;
  }
  if (xs.empty()) throw CLI::ValidationError("--samples", "no data in " + path);
  return xs;
}

alap::ALParams parse_al_ref(const std::string& spec) {
  if (spec.rfind("al:", 0) != 0)
    throw CLI::ValidationError("--ref", "expected al:mu,a,b");
  std::stringstream ss(spec.substr(3));
  std::string tok;
  std::vector<double> v;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() != 3) throw CLI::ValidationError("--ref", "expected al:mu,a,b");
  return alap::ALParams(v[0], v[1], v[2]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asymmetric Laplace approximation toolkit"};
  app.require_subcommand(1);

  // ---- al ----------------------------------------------------------------
  double mu = 0.0, a = 0.0, b = 1.0, x = 0.0, u = 0.5, t = 0.0;
  std::string op = "pdf";
  std::uint64_t n = 1, seed = 1;
  auto* al = app.add_subcommand("al", "asymmetric Laplace distribution");
  al->add_option("--mu", mu);
  al->add_option("--a", a);
  al->add_option("--b", b);
  al->add_option("--op", op)->check(CLI::IsMember({"pdf", "cdf", "quantile", "cf", "sample"}));
  al->add_option("--x", x);
  al->add_option("--u", u);
  al->add_option("--t", t);
  al->add_option("--n", n);
  al->add_option("--seed", seed);
  al->callback([&]() {
    const alap::ALParams p(mu, a, b);
    if (op == "pdf") print_value(alap::al_pdf(p, x));
    else if (op == "cdf") print_value(alap::al_cdf(p, x));
    else if (op == "quantile") print_value(alap::al_quantile(p, u));
    else if (op == "cf") {
      const auto v = alap::al_cf(p, t);
      std::printf("%.17g,%.17g\n", v.real(), v.imag());
    } else {
      alap::Rng rng(seed, 0);
      for (std::uint64_t i = 0; i < n; ++i) print_value(alap::al_sample(p, rng));
    }
  });

  // ---- stein ---------------------------------------------------------------
  double sa = 0.0, sb = 1.0, sx = 0.0;
  std::string hspec = "sin";
  int deriv = 0;
  auto* stein = app.add_subcommand("stein", "Stein equation solution");
  stein->add_option("--a", sa);
  stein->add_option("--b", sb);
  stein->add_option("--h", hspec);
  stein->add_option("--x", sx);
  stein->add_option("--deriv", deriv)->check(CLI::Range(0, 2));
  auto* stein_selfcheck = stein->add_subcommand("selfcheck", "regularity and discrepancy suite");
  stein->callback([&]() {
    if (stein_selfcheck->parsed()) {
      const int failures = alap::selfcheck_stein(std::cout);
      std::exit(failures == 0 ? 0 : 1);
    }
    const alap::ALParams p(0.0, sa, sb);
    alap::SteinSolver solver(p, parse_test_function(hspec));
    if (deriv == 0) print_value(solver.value(sx));
    else if (deriv == 1) print_value(solver.deriv(sx));
    else print_value(solver.second(sx));
  });

  // ---- equilibrium ---------------------------------------------------------
  std::string base_spec = "rademacher", eop = "density";
  double ew = 0.0, eu = 0.5;
  int er = 1;
  std::uint64_t en = 1, eseed = 1;
  auto* eq = app.add_subcommand("equilibrium", "asymmetric equilibrium transform");
  eq->add_option("--base", base_spec);
  eq->add_option("--op", eop)
      ->check(CLI::IsMember({"density", "cdf", "quantile", "sample", "moment"}));
  eq->add_option("--w", ew);
  eq->add_option("--u", eu);
  eq->add_option("--r", er);
  eq->add_option("--n", en);
  eq->add_option("--seed", eseed);
  eq->callback([&]() {
    const alap::BaseDistribution base = alap::parse_base(base_spec);
    if (eop == "density") print_value(alap::equilibrium_density(base, ew));
    else if (eop == "cdf") print_value(alap::equilibrium_cdf(base, ew));
    else if (eop == "quantile") print_value(alap::equilibrium_quantile(base, eu));
    else if (eop == "moment") print_value(alap::equilibrium_moment(base, er));
    else {
      alap::Rng rng(eseed, 0);
      const auto view = alap::equilibrium_view_cached(base);
      for (std::uint64_t i = 0; i < en; ++i) print_value(view->sample(rng));
    }
  });

  // ---- metric ----------------------------------------------------------------
  std::string samples_path, ref_spec = "al:0,0,1", kind = "ks";
  auto* metric = app.add_subcommand("metric", "empirical distance to a reference law");
  metric->add_option("--samples", samples_path)->required();
  metric->add_option("--ref", ref_spec);
  metric->add_option("--kind", kind)->check(CLI::IsMember({"ks", "w1", "d2lb", "d12lb"}));
  metric->callback([&]() {
    auto xs = read_sample_csv(samples_path);
    std::sort(xs.begin(), xs.end());
    const alap::ALParams ref = parse_al_ref(ref_spec);
    const auto reference = alap::make_reference(ref);
    alap::MetricEstimate est;
    alap::Rng rng(1, 0);
    if (kind == "ks") {
      est = alap::empirical_kolmogorov(xs, reference);
    } else if (kind == "w1") {
      est = alap::empirical_wasserstein(xs, reference);
      est.confidence_radius = alap::bootstrap_radius_w1(xs, reference, rng);
    } else {
      const auto cls = kind == "d2lb" ? alap::SmoothClass::d2 : alap::SmoothClass::d12;
      est = alap::smooth_lower_bound(xs, ref, cls);
      est.confidence_radius = alap::bootstrap_radius_smooth(xs, ref, cls, rng);
    }
    std::printf("%.17g %.17g %s\n", est.value, est.confidence_radius,
                est.kind == alap::MetricEstimate::Kind::exact ? "exact" : "lower_bound");
  });

  // ---- bound ---------------------------------------------------------------
  std::string formula, params_spec;
  bool soft = false;
  auto* bound = app.add_subcommand("bound", "closed-form error-bound evaluator");
  bound->add_option("--formula", formula)->required();
  bound->add_option("--params", params_spec, "comma-separated k=v pairs");
  bound->add_flag("--soft", soft, "+inf instead of an error when hypotheses fail");
  bound->callback([&]() {
    std::map<std::string, double> params;
    std::stringstream ss(params_spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      const auto eqpos = tok.find('=');
      if (eqpos == std::string::npos)
        throw CLI::ValidationError("--params", "expected k=v, got " + tok);
      params[tok.substr(0, eqpos)] = std::stod(tok.substr(eqpos + 1));
    }
    const alap::BoundValue bv = alap::bound_by_id(formula, params, soft);
    nlohmann::json j;
    j["formula"] = bv.formula_id;
    j["value"] = bv.value;
    j["hypotheses"] = nlohmann::json::array();
    for (const auto& [name, ok] : bv.hypothesis_report)
      j["hypotheses"].push_back({{"condition", name}, {"holds", ok}});
    std::cout << j.dump() << "\n";
  });

  // ---- experiment -------------------------------------------------------------
  std::string config_path, out_path;
  int threads = 0;
  bool timing = false;
  auto* exp = app.add_subcommand("experiment", "bound-vs-empirical grid study");
  exp->add_option("--config", config_path)->required();
  exp->add_option("--out", out_path);
  exp->add_option("--threads", threads);
  exp->add_flag("--timing", timing, "write measured wall_ms (CSV no longer byte-stable)");
  exp->callback([&]() {
    alap::ExperimentConfig cfg = alap::load_config(config_path);
    if (threads > 0) cfg.threads = threads;
    if (!out_path.empty()) cfg.out = out_path;
    if (timing) cfg.timing = true;
    const auto rows = alap::run_experiment(cfg);
    if (cfg.out.empty()) {
      alap::write_csv(rows, std::cout, cfg.timing);
    } else {
      std::ofstream os(cfg.out, std::ios::binary);
      if (!os) throw CLI::ValidationError("--out", "cannot open " + cfg.out);
      alap::write_csv(rows, os, cfg.timing);
    }
    std::exit(alap::all_within_bounds(rows) ? 0 : 1);
  });

  // ---- selfcheck -----------------------------------------------------------
  auto* self = app.add_subcommand("selfcheck", "stein + equilibrium invariant suites");
  self->callback([&]() { std::exit(alap::run_selfcheck(std::cout) == 0 ? 0 : 1); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
