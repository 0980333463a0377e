#include "alap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "alap/errors.hpp"

namespace alap {

namespace {

constexpr double kPi = 3.14159265358979323846;

// int_a^b F(x) dx = G(b) - G(a) with G(x) = x F(x) - E[Z 1{Z<=x}]
double cdf_antiderivative(const Reference& ref, double x) {
  return x * ref.cdf(x) - ref.partial_moment(x);
}

struct SmoothMember {
  std::function<double(double)> h;
  double expectation;
  std::string name;
};

std::vector<SmoothMember> smooth_family(const ALParams& al, SmoothClass cls) {
  std::vector<SmoothMember> fam;
  for (int j = -3; j <= 4; ++j) {
    const double w = std::ldexp(1.0, j);
    if (cls == SmoothClass::d12 && w < 1.0) continue;
    for (double phi : {0.0, kPi / 2.0}) {
      // h(x) = -cos(wx+phi)/w^2; E h(Z) = -Re(e^{i phi} cf(w))/w^2
      const std::complex<double> e(std::cos(phi), std::sin(phi));
      const double eh = -std::real(e * al_cf(al, w)) / (w * w);
      fam.push_back({[w, phi](double x) { return -std::cos(w * x + phi) / (w * w); }, eh,
                     "cos:" + std::to_string(w) + "," + std::to_string(phi)});
    }
  }
  const double m = al.mean();
  fam.push_back({[](double x) { return x; }, m, "id"});
  fam.push_back({[](double x) { return -x; }, -m, "-id"});
  return fam;
}

}  // namespace

Reference make_reference(const ALParams& p) {
  Reference r;
  r.cdf = [p](double x) { return al_cdf(p, x); };
  r.quantile = [p](double u) { return al_quantile(p, u); };
  r.partial_moment = [p](double x) { return al_trunc_moment(p, 1, x); };
  r.mean = p.mean();
  return r;
}

Reference make_reference(const BaseDistribution& d) {
  Reference r;
  r.cdf = d.cdf;
  r.quantile = d.quantile;
  r.partial_moment = [d](double x) { return d.trunc_moment(1, x); };
  r.mean = d.mean;
  return r;
}

MetricEstimate empirical_kolmogorov(std::span<const double> sorted, const Reference& ref) {
  if (sorted.empty()) throw std::domain_error("empirical_kolmogorov: empty sample");
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = ref.cdf(sorted[i]);
    worst = std::max(worst, std::max(std::abs((i + 1) / n - F), std::abs(i / n - F)));
  }
  MetricEstimate est;
  est.value = worst;
  est.kind = MetricEstimate::Kind::exact;
  est.confidence_radius = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));  // DKW, 99%
  est.n = sorted.size();
  return est;
}

namespace {

// W1 between a weighted empirical cdf (counts[i] at sorted[i], total nw) and
// the reference; exact segment integrals via the cdf antiderivative.
double w1_weighted(std::span<const double> sorted, std::span<const std::uint32_t> counts,
                   double nw, const Reference& ref) {
  double total = 0.0;
  // left tail: F_n = 0 below the first point
  total += cdf_antiderivative(ref, sorted.front());  // == int_-inf^x1 F
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    cum += counts.empty() ? 1.0 : static_cast<double>(counts[i]);
    const double c = cum / nw;
    const double a = sorted[i], b = sorted[i + 1];
    if (b <= a) continue;
    const double Fa = ref.cdf(a), Fb = ref.cdf(b);
    if (Fb <= c) {
      total += c * (b - a) - (cdf_antiderivative(ref, b) - cdf_antiderivative(ref, a));
    } else if (Fa >= c) {
      total += (cdf_antiderivative(ref, b) - cdf_antiderivative(ref, a)) - c * (b - a);
    } else {
      const double xs = std::clamp(ref.quantile(c), a, b);
      const double Gl = cdf_antiderivative(ref, xs) - cdf_antiderivative(ref, a);
      const double Gr = cdf_antiderivative(ref, b) - cdf_antiderivative(ref, xs);
      total += (c * (xs - a) - Gl) + (Gr - c * (b - xs));
    }
  }
  // right tail: int_xn^inf (1 - F) = E[(Z - xn)+]
  const double xn = sorted.back();
  total += (ref.mean - ref.partial_moment(xn)) - xn * (1.0 - ref.cdf(xn));
  return total;
}

}  // namespace

MetricEstimate empirical_wasserstein(std::span<const double> sorted, const Reference& ref) {
  if (sorted.empty()) throw std::domain_error("empirical_wasserstein: empty sample");
  MetricEstimate est;
  est.value = w1_weighted(sorted, {}, static_cast<double>(sorted.size()), ref);
  est.kind = MetricEstimate::Kind::exact;
  est.n = sorted.size();
  return est;
}

MetricEstimate smooth_lower_bound(std::span<const double> samples, const ALParams& al,
                                  SmoothClass cls) {
  if (samples.empty()) throw std::domain_error("smooth_lower_bound: empty sample");
  const auto fam = smooth_family(al, cls);
  double best = 0.0;
  for (const auto& mem : fam) {
    double mean = 0.0;
    std::size_t c = 0;
    for (double x : samples) mean += (mem.h(x) - mean) / static_cast<double>(++c);
    best = std::max(best, std::abs(mean - mem.expectation));
  }
  MetricEstimate est;
  est.value = best;
  est.kind = MetricEstimate::Kind::lower_bound;
  est.n = samples.size();
  return est;
}

double smooth_family_se(std::span<const double> samples, const ALParams& al, SmoothClass cls) {
  const auto fam = smooth_family(al, cls);
  double worst = 0.0;
  for (const auto& mem : fam) {
    double mean = 0.0, m2 = 0.0;
    std::size_t c = 0;
    for (double x : samples) {
      const double v = mem.h(x);
      ++c;
      const double d = v - mean;
      mean += d / static_cast<double>(c);
      m2 += d * (v - mean);
    }
    const double sd = std::sqrt(m2 / std::max<std::size_t>(1, samples.size() - 1));
    worst = std::max(worst, sd / std::sqrt(static_cast<double>(samples.size())));
  }
  return worst;
}

namespace {

// multinomial bootstrap counts over n cells, drawn as n iid index picks
void bootstrap_counts(std::vector<std::uint32_t>& counts, Rng& rng) {
  std::fill(counts.begin(), counts.end(), 0u);
  const std::uint64_t n = counts.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t j = static_cast<std::uint64_t>(rng.uniform() * static_cast<double>(n));
    ++counts[std::min<std::uint64_t>(j, n - 1)];
  }
}

double quantile99(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = static_cast<std::size_t>(0.99 * (v.size() - 1));
  return v[k];
}

}  // namespace

double bootstrap_radius_w1(std::span<const double> sorted, const Reference& ref, Rng& rng,
                           int resamples) {
  const double base = w1_weighted(sorted, {}, static_cast<double>(sorted.size()), ref);
  std::vector<std::uint32_t> counts(sorted.size());
  std::vector<double> devs;
  devs.reserve(resamples);
  for (int r = 0; r < resamples; ++r) {
    bootstrap_counts(counts, rng);
    const double v = w1_weighted(sorted, counts, static_cast<double>(sorted.size()), ref);
    devs.push_back(std::abs(v - base));
  }
  return quantile99(devs);
}

double bootstrap_radius_smooth(std::span<const double> samples, const ALParams& al,
                               SmoothClass cls, Rng& rng, int resamples) {
  const auto fam = smooth_family(al, cls);
  const std::size_t n = samples.size();
  // per-sample member values, row-major per sample for cache-friendly resampling
  const std::size_t m = fam.size();
  std::vector<double> hv(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) hv[i * m + j] = fam[j].h(samples[i]);

  double base = 0.0;
  {
    std::vector<double> sums(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) sums[j] += hv[i * m + j];
    for (std::size_t j = 0; j < m; ++j)
      base = std::max(base, std::abs(sums[j] / n - fam[j].expectation));
  }

  std::vector<std::uint32_t> counts(n);
  std::vector<double> devs;
  devs.reserve(resamples);
  std::vector<double> sums(m);
  for (int r = 0; r < resamples; ++r) {
    bootstrap_counts(counts, rng);
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = counts[i];
      if (c == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) sums[j] += c * hv[i * m + j];
    }
    double v = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      v = std::max(v, std::abs(sums[j] / n - fam[j].expectation));
    devs.push_back(std::abs(v - base));
  }
  return quantile99(devs);
}

double two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("two_sample_ks: empty sample");
  double worst = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    worst = std::max(worst, std::abs(fa - fb));
  }
  return worst;
}

double ks_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(std::log(2.0 / alpha) / 2.0);
  return c * std::sqrt((n + m) / (static_cast<double>(n) * m));
}

}  // namespace alap
