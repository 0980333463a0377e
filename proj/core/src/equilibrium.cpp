#include "alap/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "alap/errors.hpp"
#include "alap/quadrature.hpp"

namespace alap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_transform_defined(const BaseDistribution& base) {
  if (!(base.variance > base.mean * base.mean)) {
    throw std::domain_error("equilibrium transform undefined for '" + base.name +
                            "': variance <= mean^2");
  }
}

// knots of the v-integral: v = w / t at every atom t, plus the kink where
// w / v crosses a finite support edge
std::vector<double> v_knots(const BaseDistribution& base, double w) {
  std::vector<double> ks;
  auto add = [&ks, w](double t) {
    if (t == 0.0 || w == 0.0) return;
    const double v = w / t;
    if (v > 0.0 && v < 1.0) ks.push_back(v);
  };
  for (const Atom& at : base.atoms) add(at.x);
  if (std::isfinite(base.support_lo)) add(base.support_lo);
  if (std::isfinite(base.support_hi)) add(base.support_hi);
  return ks;
}

}  // namespace

double equilibrium_density_signed(const BaseDistribution& base, double w) {
  require_transform_defined(base);
  if (w < base.support_lo || w > base.support_hi) return 0.0;
  const double a = base.mean;
  const double scale = 2.0 / (base.variance - a * a);
  const auto knots = v_knots(base, w);
  if (w <= 0.0) {
    const double g = quad::integrate_knots(
        [&base, w](double v) { return base.partial_moment(w / v); }, 0.0, 1.0, knots, 1e-11);
    return scale * (a * base.cdf(w) - g);
  }
  const double mean = base.mean;
  const double g = quad::integrate_knots(
      [&base, w, mean](double v) { return mean - base.partial_moment(w / v); }, 0.0, 1.0,
      knots, 1e-11);
  return scale * (g - a * (1.0 - base.cdf(w)));
}

double equilibrium_density(const BaseDistribution& base, double w) {
  return std::max(equilibrium_density_signed(base, w), 0.0);
}

EquilibriumView::EquilibriumView(const BaseDistribution& base)
    : base_(std::make_shared<BaseDistribution>(base)) {
  require_transform_defined(base);
  const BaseDistribution& b = *base_;

  // working range: the support, expanded past the quantile tails until the
  // density has decayed
  lo_ = b.support_lo;
  hi_ = b.support_hi;
  double wlo = std::isfinite(lo_) ? lo_ : b.quantile(1e-9);
  double whi = std::isfinite(hi_) ? hi_ : b.quantile(1.0 - 1e-9);
  if (!(whi > wlo)) {
    wlo -= 1.0;
    whi += 1.0;
  }
  const double step = (whi - wlo) / 8.0;
  if (!std::isfinite(lo_)) {
    for (int i = 0; i < 200 && equilibrium_density(b, wlo) > 1e-14; ++i) wlo -= step;
  }
  if (!std::isfinite(hi_)) {
    for (int i = 0; i < 200 && equilibrium_density(b, whi) > 1e-14; ++i) whi += step;
  }

  auto add_special = [&](std::vector<double>& v) {
    for (const Atom& at : b.atoms)
      if (at.x > wlo && at.x < whi) v.push_back(at.x);
    if (0.0 > wlo && 0.0 < whi) v.push_back(0.0);
  };

  // pilot pass: rough cdf on an equispaced grid
  std::vector<double> px;
  const int np = 513;
  for (int i = 0; i < np; ++i) px.push_back(wlo + (whi - wlo) * i / (np - 1));
  add_special(px);
  std::sort(px.begin(), px.end());
  px.erase(std::unique(px.begin(), px.end()), px.end());
  std::vector<double> pf(px.size()), pF(px.size(), 0.0);
  for (std::size_t i = 0; i < px.size(); ++i) pf[i] = equilibrium_density(b, px[i]);
  for (std::size_t i = 1; i < px.size(); ++i)
    pF[i] = pF[i - 1] + 0.5 * (pf[i] + pf[i - 1]) * (px[i] - px[i - 1]);
  const double ptot = pF.back() > 0.0 ? pF.back() : 1.0;

  // final knots: quantile-spaced through the pilot cdf, plus atoms and 0
  const int m = 4096;
  std::vector<double> xs;
  xs.reserve(m + 8);
  for (int j = 0; j < m; ++j) {
    const double u = ptot * j / (m - 1.0);
    auto it = std::lower_bound(pF.begin(), pF.end(), u);
    if (it == pF.begin()) {
      xs.push_back(px.front());
      continue;
    }
    if (it == pF.end()) {
      xs.push_back(px.back());
      continue;
    }
    const std::size_t k = static_cast<std::size_t>(it - pF.begin());
    const double dF = pF[k] - pF[k - 1];
    const double t = dF > 0.0 ? (u - pF[k - 1]) / dF : 0.5;
    xs.push_back(px[k - 1] + t * (px[k] - px[k - 1]));
  }
  add_special(xs);
  xs.push_back(wlo);
  xs.push_back(whi);
  std::sort(xs.begin(), xs.end());
  const double minsep = 1e-13 * (whi - wlo);
  x_.clear();
  for (double x : xs)
    if (x_.empty() || x - x_.back() > minsep) x_.push_back(x);

  // densities and per-interval masses
  f_.resize(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) f_[i] = equilibrium_density(b, x_[i]);
  F_.assign(x_.size(), 0.0);
  // one GK15 panel per knot interval: on a quantile-spaced grid the panel
  // error sits below the density's own quadrature noise
  for (std::size_t i = 1; i < x_.size(); ++i) {
    const double seg =
        quad::panel([&b](double w) { return equilibrium_density(b, w); }, x_[i - 1], x_[i]);
    F_[i] = F_[i - 1] + std::max(seg, 0.0);
  }
  const double total = F_.back();
  if (!(total > 0.0)) throw numeric_error("EquilibriumView: vanishing total mass");
  for (auto& v : F_) v /= total;
  for (auto& v : f_) v /= total;

  // Fritsch-Carlson clamp keeps the Hermite interpolant monotone
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double sl = i > 0 ? (F_[i] - F_[i - 1]) / (x_[i] - x_[i - 1]) : kInf;
    const double sr = i + 1 < x_.size() ? (F_[i + 1] - F_[i]) / (x_[i + 1] - x_[i]) : kInf;
    f_[i] = std::min(f_[i], 3.0 * std::min(sl, sr));
  }
}

namespace {

double hermite(double x0, double x1, double F0, double F1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return F0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) + F1 * (-2 * t3 + 3 * t2) +
         h * d1 * (t3 - t2);
}

double hermite_d(double x0, double x1, double F0, double F1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  return (F0 * (6 * t2 - 6 * t) + h * d0 * (3 * t2 - 4 * t + 1) + F1 * (-6 * t2 + 6 * t) +
          h * d1 * (3 * t2 - 2 * t)) /
         h;
}

}  // namespace

double EquilibriumView::density(double w) const { return equilibrium_density(*base_, w); }

double EquilibriumView::cdf(double w) const {
  if (w <= x_.front()) return 0.0;
  if (w >= x_.back()) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), w);
  const std::size_t k = static_cast<std::size_t>(it - x_.begin());
  return hermite(x_[k - 1], x_[k], F_[k - 1], F_[k], f_[k - 1], f_[k], w);
}

double EquilibriumView::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
  auto it = std::lower_bound(F_.begin(), F_.end(), u);
  std::size_t k = static_cast<std::size_t>(it - F_.begin());
  if (k == 0) return x_.front();
  if (k >= x_.size()) return x_.back();
  const double x0 = x_[k - 1], x1 = x_[k];
  const double F0 = F_[k - 1], F1 = F_[k], d0 = f_[k - 1], d1 = f_[k];
  if (F1 <= F0) return x0;
  double blo = x0, bhi = x1;  // bisection bracket inside the fixed interval
  double x = x0 + (x1 - x0) * (u - F0) / (F1 - F0);
  for (int i = 0; i < 60; ++i) {
    const double v = hermite(x0, x1, F0, F1, d0, d1, x) - u;
    if (std::abs(v) < 1e-13) break;
    if (v > 0.0)
      bhi = x;
    else
      blo = x;
    const double dv = hermite_d(x0, x1, F0, F1, d0, d1, x);
    double xn = dv > 0.0 ? x - v / dv : 0.5 * (blo + bhi);
    if (!(xn > blo && xn < bhi)) xn = 0.5 * (blo + bhi);
    if (xn == x) break;
    x = xn;
  }
  return x;
}

double EquilibriumView::sample(Rng& rng) const { return quantile(rng.uniform_open()); }

std::shared_ptr<const EquilibriumView> equilibrium_view_cached(const BaseDistribution& base) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const EquilibriumView>> cache;
  std::ostringstream key;
  key << base.name << "|";
  key.precision(17);
  key << base.mean << "|" << base.variance;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;
  auto view = std::make_shared<const EquilibriumView>(base);
  cache.emplace(key.str(), view);
  return view;
}

double equilibrium_cdf(const BaseDistribution& base, double w) {
  return equilibrium_view_cached(base)->cdf(w);
}

double equilibrium_quantile(const BaseDistribution& base, double u) {
  return equilibrium_view_cached(base)->quantile(u);
}

double equilibrium_sample(const BaseDistribution& base, Rng& rng) {
  return equilibrium_view_cached(base)->sample(rng);
}

double equilibrium_moment(const BaseDistribution& base, int r) {
  require_transform_defined(base);
  if (r < 0) throw std::domain_error("equilibrium_moment: r must be >= 0");
  if (!base.raw_moment) throw capability_error("equilibrium_moment: base lacks raw moments");
  const double a = base.mean;
  const double denom = (r + 1.0) * (r + 2.0) * (base.variance - a * a);
  return (2.0 * base.raw_moment(r + 2) - 2.0 * a * (r + 2.0) * base.raw_moment(r + 1)) / denom;
}

double equilibrium_abs_moment(const BaseDistribution& base, int r) {
  require_transform_defined(base);
  if (r < 0) throw std::domain_error("equilibrium_abs_moment: r must be >= 0");
  if (!base.raw_moment || !base.trunc_moment)
    throw capability_error("equilibrium_abs_moment: base lacks moment data");
  const double a = base.mean;
  const double denom = (r + 1.0) * (r + 2.0) * (base.variance - a * a);
  return (2.0 * base.abs_moment(r + 2) - 2.0 * a * (r + 2.0) * base.signed_abs_moment(r + 1)) /
         denom;
}

std::complex<double> equilibrium_cf(const std::function<std::complex<double>(double)>& phi_base,
                                    double a, double sigma2, double t, double mu3, double mu4) {
  if (!(sigma2 > a * a))
    throw std::domain_error("equilibrium_cf: variance <= mean^2, transform undefined");
  const double d = sigma2 - a * a;
  if (std::abs(t) < 1e-4 && std::isfinite(mu3) && std::isfinite(mu4)) {
    const double mu2 = sigma2 + a * a;
    const double c1 = (mu3 / 6.0 - a * mu2 / 2.0) * 2.0 / d;
    const double c2 = (a * mu3 / 6.0 - mu4 / 24.0) * 2.0 / d;
    return {1.0 + c2 * t * t, c1 * t};
  }
  if (t == 0.0) return {1.0, 0.0};
  const std::complex<double> i(0.0, 1.0);
  return 2.0 * (1.0 + (i * (a * t) - 1.0) * phi_base(t)) / (t * t * d);
}

double equilibrium_scale_check(const BaseDistribution& base, double c) {
  if (c == 0.0) throw std::domain_error("equilibrium_scale_check: c must be nonzero");
  require_transform_defined(base);
  const BaseDistribution scaled = scale(base, c);
  double qlo = std::isfinite(base.support_lo) ? base.support_lo : base.quantile(1e-3);
  double qhi = std::isfinite(base.support_hi) ? base.support_hi : base.quantile(1.0 - 1e-3);
  // interior grid; exact atom locations carry one-sided convention artefacts
  const double pad = 1e-6 * (qhi - qlo);
  qlo += pad;
  qhi -= pad;
  double sup = 0.0;
  const int n = 101;
  for (int i = 0; i < n; ++i) {
    double w = qlo + (qhi - qlo) * i / (n - 1.0);
    for (const Atom& at : base.atoms)
      if (std::abs(w - at.x) < pad || std::abs(w) < pad) w += 2.0 * pad;
    const double lhs = equilibrium_density_signed(scaled, c * w);
    const double rhs = equilibrium_density_signed(base, w) / std::abs(c);
    sup = std::max(sup, std::abs(lhs - rhs));
  }
  return sup;
}

BaseDistribution zero_bias(const BaseDistribution& base) {
  if (std::abs(base.mean) > 1e-12)
    throw std::domain_error("zero_bias: base must have mean zero");
  if (!(base.variance > 0.0)) throw std::domain_error("zero_bias: base needs positive variance");
  if (!base.trunc_moment || !base.raw_moment)
    throw capability_error("zero_bias: base lacks truncated moments");

  BaseDistribution d;
  d.name = "zero_bias(" + base.name + ")";
  const double s2 = base.variance;
  auto b = std::make_shared<BaseDistribution>(base);
  d.mean = b->raw_moment(3) / (2.0 * s2);
  d.variance = b->raw_moment(4) / (3.0 * s2) - d.mean * d.mean;
  d.support_lo = base.support_lo;
  d.support_hi = base.support_hi;
  d.discrete = false;
  d.atoms.clear();

  const double lo = d.support_lo, hi = d.support_hi;
  d.density_or_mass = [b, s2, lo, hi](double w) {
    if (w < lo || w > hi) return 0.0;
    return std::max(-b->partial_moment(w), 0.0) / s2;
  };
  auto cdf = [b, s2, lo, hi](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double v = (b->trunc_moment(2, x) - x * b->trunc_moment(1, x)) / s2;
    return std::clamp(v, 0.0, 1.0);
  };
  d.cdf = cdf;
  d.trunc_moment = [b, s2, lo, hi](int k, double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return b->raw_moment(k + 2) / ((k + 1.0) * s2);
    return (b->trunc_moment(k + 2, x) - std::pow(x, k + 1) * b->trunc_moment(1, x)) /
           ((k + 1.0) * s2);
  };
  d.raw_moment = [b, s2](int k) { return b->raw_moment(k + 2) / ((k + 1.0) * s2); };
  auto pdf = d.density_or_mass;
  d.quantile = [b, cdf, pdf](double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    double lo2 = std::isfinite(b->support_lo) ? b->support_lo : -1.0;
    double hi2 = std::isfinite(b->support_hi) ? b->support_hi : 1.0;
    for (int i = 0; i < 200 && cdf(lo2) > u; ++i) lo2 = lo2 * 2.0 - 1.0;
    for (int i = 0; i < 200 && cdf(hi2) < u; ++i) hi2 = hi2 * 2.0 + 1.0;
    for (int i = 0; i < 90; ++i) {
      const double mid = 0.5 * (lo2 + hi2);
      (cdf(mid) < u ? lo2 : hi2) = mid;
    }
    double x = 0.5 * (lo2 + hi2);
    for (int i = 0; i < 8; ++i) {
      const double f = cdf(x) - u, df = pdf(x);
      if (df <= 0.0) break;
      const double nx = x - f / df;
      if (nx <= lo2 - 1.0 || nx >= hi2 + 1.0) break;
      if (nx == x) break;
      x = nx;
    }
    return x;
  };
  auto q = d.quantile;
  d.sample = [q](Rng& rng) { return q(rng.uniform_open()); };
  return d;
}

GeometricCoupler::GeometricCoupler(double p, double a, const BaseDistribution& x_base)
    : p_(p), a_(a) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("couple_geometric: p must lie in (0,1)");
  if (std::abs(x_base.mean) > 1e-12)
    throw std::domain_error("couple_geometric: X base must have mean zero");
  if (!(x_base.variance > p * a * a))
    throw std::domain_error("couple_geometric: transform undefined, sigma^2 <= p a^2");
  y_ = shift(x_base, std::sqrt(p) * a);
  ya_ = equilibrium_view_cached(y_);
}

CoupledPair GeometricCoupler::draw(Rng& rng) const {
  const std::uint64_t n = rng.geometric(p_);
  double head = 0.0;  // shared first N-1 summands
  for (std::uint64_t i = 1; i < n; ++i) head += y_.sample(rng);
  const double yn = y_.sample(rng);
  const double ya = ya_->sample(rng);
  const double rp = std::sqrt(p_);
  CoupledPair out;
  out.w = rp * (head + yn);
  out.w_a = rp * (head + ya);
  out.n = n;
  return out;
}

NestedGeometricCoupler::NestedGeometricCoupler(double q, const BaseDistribution& t_base,
                                               const BaseDistribution& y_base)
    : q_(q), t_(t_base), y_(y_base) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("couple_nested_geometric: q in (0,1)");
  if (t_base.atoms.empty())
    throw capability_error("couple_nested_geometric: T must have finite integer support");
  for (const Atom& at : t_base.atoms) {
    if (at.x < 1.0 || at.x != std::floor(at.x))
      throw capability_error("couple_nested_geometric: T atoms must be integers >= 1");
  }
  // law of X = sum_{j=1}^{T} Y_j
  const bool y_normal = y_base.name.rfind("normal:", 0) == 0;
  if (y_normal) {
    std::vector<MixComponent> comps;
    for (const Atom& at : t_base.atoms) {
      comps.push_back({at.mass, at.x * y_base.mean, std::sqrt(at.x * y_base.variance)});
    }
    x_ = normal_mixture(comps);
  } else if (!y_base.atoms.empty()) {
    // discrete convolution powers
    std::map<double, double> acc;
    for (const Atom& t : t_base.atoms) {
      const int k = static_cast<int>(t.x);
      std::map<double, double> conv{{0.0, 1.0}};
      for (int j = 0; j < k; ++j) {
        std::map<double, double> next;
        for (const auto& [xv, mv] : conv)
          for (const Atom& ya : y_base.atoms) next[xv + ya.x] += mv * ya.mass;
        conv = std::move(next);
      }
      for (const auto& [xv, mv] : conv) acc[xv] += t.mass * mv;
    }
    std::vector<Atom> atoms;
    for (const auto& [xv, mv] : acc) atoms.push_back({xv, mv});
    x_ = discrete_from_atoms("compound(" + t_base.name + "," + y_base.name + ")", atoms);
  } else {
    throw capability_error(
        "couple_nested_geometric: X law needs Y normal or Y with finite atoms");
  }
  if (!(x_.variance > x_.mean * x_.mean)) {
    throw std::domain_error("couple_nested_geometric: transform undefined, Var(X) <= (E X)^2");
  }
  xa_ = equilibrium_view_cached(x_);
}

CoupledPair NestedGeometricCoupler::draw(Rng& rng) const {
  const std::uint64_t s = rng.geometric(q_);
  std::uint64_t m = 0;
  for (std::uint64_t k = 1; k < s; ++k) m += static_cast<std::uint64_t>(t_.sample(rng));
  const std::uint64_t tn = static_cast<std::uint64_t>(t_.sample(rng));
  double head = 0.0;
  for (std::uint64_t j = 0; j < m; ++j) head += y_.sample(rng);
  double tail = 0.0;
  for (std::uint64_t j = 0; j < tn; ++j) tail += y_.sample(rng);
  CoupledPair out;
  out.w = head + tail;
  out.w_a = head + xa_->sample(rng);
  out.n = s;
  return out;
}

PerturbedCoupler::PerturbedCoupler(double a, double b, const BaseDistribution& eta_base)
    : a_(a), b_(b), eta_(eta_base) {
  if (!(b > 0.0)) throw std::domain_error("couple_perturbed: b must be positive");
  if (std::abs(eta_base.mean) > 1e-12)
    throw std::domain_error("couple_perturbed: noise must have mean zero");
  tau2_ = eta_base.variance;
  if (!(tau2_ > 0.0)) throw std::domain_error("couple_perturbed: noise needs positive variance");
  // the mean-zero normal is the fixed point of the zero-bias transform
  if (eta_base.name.rfind("normal:", 0) == 0)
    eta_z_ = eta_base;
  else
    eta_z_ = zero_bias(eta_base);
}

CoupledPair PerturbedCoupler::draw(Rng& rng) const {
  const double x = rng.exponential();
  const double l = b_ * std::sqrt(x) * rng.normal();  // sqrt(X) N_b
  const double eta = eta_.sample(rng);
  const bool i = rng.uniform() < bernoulli_mean();
  const double bd = std::sqrt(rng.uniform_open());  // Beta(2,1)
  CoupledPair out;
  out.w = a_ * x + l + eta;
  if (i) {
    out.w_a = (a_ * x + l) + bd * eta;
  } else {
    out.w_a = bd * (l + eta_z_.sample(rng));
  }
  out.n = 0;
  out.b = bd;
  out.i = i;
  return out;
}

}  // namespace alap
