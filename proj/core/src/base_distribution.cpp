#include "alap/base_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "alap/al.hpp"

namespace alap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double exp_partial_sum(int k, double z) {
  double term = 1.0, sum = 1.0;
  for (int j = 1; j <= k; ++j) {
    term *= z / j;
    sum += term;
  }
  return std::exp(-z) * sum;
}

}  // namespace

BaseDistribution discrete_from_atoms(std::string name, std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  // merge coincident atoms
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().x == a.x)
      merged.back().mass += a.mass;
    else
      merged.push_back(a);
  }
  double mean = 0.0, m2 = 0.0, total = 0.0;
  for (const Atom& a : merged) {
    mean += a.x * a.mass;
    m2 += a.x * a.x * a.mass;
    total += a.mass;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("atom masses must sum to 1");

  BaseDistribution d;
  d.name = std::move(name);
  d.mean = mean;
  d.variance = m2 - mean * mean;
  d.support_lo = merged.front().x;
  d.support_hi = merged.back().x;
  d.discrete = true;
  d.atoms = merged;
  auto atoms_copy = merged;
  d.density_or_mass = [atoms_copy](double x) {
    for (const Atom& a : atoms_copy)
      if (a.x == x) return a.mass;
    return 0.0;
  };
  d.cdf = [atoms_copy](double x) {
    double s = 0.0;
    for (const Atom& a : atoms_copy)
      if (a.x <= x) s += a.mass;
    return s;
  };
  d.trunc_moment = [atoms_copy](int k, double x) {
    double s = 0.0;
    for (const Atom& a : atoms_copy)
      if (a.x <= x) s += std::pow(a.x, k) * a.mass;
    return s;
  };
  d.raw_moment = [atoms_copy](int k) {
    double s = 0.0;
    for (const Atom& a : atoms_copy) s += std::pow(a.x, k) * a.mass;
    return s;
  };
  d.quantile = [atoms_copy](double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    double c = 0.0;
    for (const Atom& a : atoms_copy) {
      c += a.mass;
      if (u <= c) return a.x;
    }
    return atoms_copy.back().x;
  };
  d.sample = [atoms_copy](Rng& rng) {
    const double u = rng.uniform_open();
    double c = 0.0;
    for (const Atom& a : atoms_copy) {
      c += a.mass;
      if (u <= c) return a.x;
    }
    return atoms_copy.back().x;
  };
  return d;
}

double BaseDistribution::abs_moment(int k) const {
  if (k == 0) return 1.0;
  if (k % 2 == 0) return raw_moment(k);
  return raw_moment(k) - 2.0 * trunc_moment(k, 0.0);
}

double BaseDistribution::signed_abs_moment(int k) const {
  if (k == 0) {
    double m0 = 0.0;
    for (const Atom& a : atoms)
      if (a.x == 0.0) m0 = a.mass;
    return 1.0 - 2.0 * cdf(0.0) + m0;
  }
  if (k % 2 == 1) return raw_moment(k);
  return raw_moment(k) - 2.0 * trunc_moment(k, 0.0);
}

MomentProfile BaseDistribution::profile() const {
  return MomentProfile{mean, variance, abs_moment(3), raw_moment(4), raw_moment(3)};
}

BaseDistribution two_point(double x1, double p1, double x2) {
  if (!(p1 > 0.0 && p1 < 1.0)) throw std::domain_error("two_point: p1 must lie in (0,1)");
  if (x1 == x2) throw std::domain_error("two_point: atoms must be distinct");
  std::ostringstream n;
  n << "twopoint:" << x1 << "," << p1 << "," << x2;
  return discrete_from_atoms(n.str(), {{x1, p1}, {x2, 1.0 - p1}});
}

BaseDistribution rademacher() {
  auto d = discrete_from_atoms("rademacher", {{-1.0, 0.5}, {1.0, 0.5}});
  return d;
}

BaseDistribution rademacher_shifted(double m) {
  std::ostringstream n;
  n << "rademacher_shifted:" << m;
  return discrete_from_atoms(n.str(), {{m - 1.0, 0.5}, {m + 1.0, 0.5}});
}

BaseDistribution uniform_dist(double a, double b) {
  if (!(a < b)) throw std::domain_error("uniform: need a < b");
  BaseDistribution d;
  std::ostringstream n;
  n << "uniform:" << a << "," << b;
  d.name = n.str();
  d.mean = 0.5 * (a + b);
  d.variance = (b - a) * (b - a) / 12.0;
  d.support_lo = a;
  d.support_hi = b;
  const double w = b - a;
  d.density_or_mass = [a, b, w](double x) { return (x >= a && x <= b) ? 1.0 / w : 0.0; };
  d.cdf = [a, b, w](double x) {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    return (x - a) / w;
  };
  d.quantile = [a, w](double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    return a + u * w;
  };
  d.trunc_moment = [a, b, w](int k, double x) {
    const double hi = std::min(x, b);
    if (hi <= a) return 0.0;
    return (std::pow(hi, k + 1) - std::pow(a, k + 1)) / ((k + 1) * w);
  };
  d.raw_moment = [a, b, w](int k) {
    return (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * w);
  };
  d.sample = [a, w](Rng& rng) { return a + w * rng.uniform(); };
  return d;
}

BaseDistribution normal_dist(double mean, double sd) {
  if (!(sd > 0.0)) throw std::domain_error("normal: sd must be positive");
  BaseDistribution d;
  std::ostringstream n;
  n << "normal:" << mean << "," << sd;
  d.name = n.str();
  d.mean = mean;
  d.variance = sd * sd;
  const double m = mean, s = sd;
  auto pdf = [m, s](double x) {
    const double z = (x - m) / s;
    return std::exp(-0.5 * z * z) / (s * 2.5066282746310005024);
  };
  auto cdf = [m, s](double x) { return 0.5 * std::erfc(-(x - m) / (s * 1.4142135623730950488)); };
  d.density_or_mass = pdf;
  d.cdf = cdf;
  d.quantile = [m, s](double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    boost::math::normal_distribution<double> nd(m, s);
    return boost::math::quantile(nd, u);
  };
  // T_k(x) = m T_{k-1} + (k-1) s^2 T_{k-2} - s^2 x^{k-1} pdf(x)
  d.trunc_moment = [m, s, pdf, cdf](int k, double x) {
    if (x == -kInf) return 0.0;
    const double fx = (x == kInf) ? 0.0 : pdf(x);
    double tm2 = (x == kInf) ? 1.0 : cdf(x);      // T_0
    if (k == 0) return tm2;
    double tm1 = m * tm2 - s * s * fx;            // T_1
    for (int j = 2; j <= k; ++j) {
      const double xj = (x == kInf) ? 0.0 : std::pow(x, j - 1) * fx;
      const double t = m * tm1 + (j - 1) * s * s * tm2 - s * s * xj;
      tm2 = tm1;
      tm1 = t;
    }
    return tm1;
  };
  d.raw_moment = [m, s](int k) {
    double tm2 = 1.0, tm1 = m;
    if (k == 0) return tm2;
    for (int j = 2; j <= k; ++j) {
      const double t = m * tm1 + (j - 1) * s * s * tm2;
      tm2 = tm1;
      tm1 = t;
    }
    return tm1;
  };
  d.sample = [m, s](Rng& rng) { return m + s * rng.normal(); };
  return d;
}

BaseDistribution normal_mixture(const std::vector<MixComponent>& comps) {
  if (comps.empty()) throw std::domain_error("normal_mixture: no components");
  double wsum = 0.0;
  for (const auto& c : comps) wsum += c.weight;
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::domain_error("normal_mixture: weights must sum to 1");
  std::vector<BaseDistribution> parts;
  std::vector<double> weights;
  for (const auto& c : comps) {
    parts.push_back(normal_dist(c.mean, c.sd));
    weights.push_back(c.weight);
  }
  BaseDistribution d;
  d.name = "normal_mixture";
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    mean += weights[i] * parts[i].mean;
    m2 += weights[i] * (parts[i].variance + parts[i].mean * parts[i].mean);
  }
  d.mean = mean;
  d.variance = m2 - mean * mean;
  d.density_or_mass = [parts, weights](double x) {
    double v = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i].density_or_mass(x);
    return v;
  };
  auto cdf = [parts, weights](double x) {
    double v = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i].cdf(x);
    return v;
  };
  d.cdf = cdf;
  d.trunc_moment = [parts, weights](int k, double x) {
    double v = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i].trunc_moment(k, x);
    return v;
  };
  d.raw_moment = [parts, weights](int k) {
    double v = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i].raw_moment(k);
    return v;
  };
  auto pdf = d.density_or_mass;
  d.quantile = [parts, weights, cdf, pdf](double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    // bracket, bisect, then Newton polish
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 200 && cdf(lo) > u; ++i) lo *= 2.0;
    for (int i = 0; i < 200 && cdf(hi) < u; ++i) hi *= 2.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < u ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 6; ++i) {
      const double f = cdf(x) - u, df = pdf(x);
      if (df <= 0.0) break;
      const double step = f / df;
      x -= step;
      if (x < lo || x > hi) {
        x = 0.5 * (lo + hi);
        break;
      }
      if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    return x;
  };
  d.sample = [parts, weights](Rng& rng) {
    const double u = rng.uniform_open();
    double c = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      c += weights[i];
      if (u <= c) return parts[i].sample(rng);
    }
    return parts.back().sample(rng);
  };
  return d;
}

BaseDistribution laplace_dist(double b) {
  auto d = al_base(0.0, 0.0, b);
  std::ostringstream n;
  n << "laplace:" << b;
  d.name = n.str();
  return d;
}

BaseDistribution exponential_unit() {
  BaseDistribution d;
  d.name = "exponential";
  d.mean = 1.0;
  d.variance = 1.0;
  d.support_lo = 0.0;
  d.density_or_mass = [](double x) { return x >= 0.0 ? std::exp(-x) : 0.0; };
  d.cdf = [](double x) { return x > 0.0 ? -std::expm1(-x) : 0.0; };
  d.quantile = [](double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    return -std::log1p(-u);
  };
  d.trunc_moment = [](int k, double x) {
    if (x <= 0.0) return 0.0;
    if (x == kInf) return factorial(k);
    return factorial(k) * (1.0 - exp_partial_sum(k, x));
  };
  d.raw_moment = [](int k) { return factorial(k); };
  d.sample = [](Rng& rng) { return rng.exponential(); };
  return d;
}

BaseDistribution geometric_dist(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("geometric: p must lie in (0,1)");
  BaseDistribution d;
  std::ostringstream n;
  n << "geometric:" << p;
  d.name = n.str();
  d.mean = 1.0 / p;
  d.variance = (1.0 - p) / (p * p);
  d.support_lo = 1.0;
  d.discrete = true;  // countable support; atom list intentionally empty
  const double q = 1.0 - p;
  d.density_or_mass = [p, q](double x) {
    if (x < 1.0 || x != std::floor(x)) return 0.0;
    return p * std::pow(q, x - 1.0);
  };
  d.cdf = [q](double x) {
    if (x < 1.0) return 0.0;
    return 1.0 - std::pow(q, std::floor(x));
  };
  d.quantile = [q](double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    return std::max(1.0, std::ceil(std::log1p(-u) / std::log(q)));
  };
  d.trunc_moment = [p, q](int k, double x) {
    if (x < 1.0) return 0.0;
    double s = 0.0, w = p;
    const double nmax = std::min(x, 1e7);
    for (double j = 1.0; j <= nmax; ++j) {
      const double term = std::pow(j, k) * w;
      s += term;
      if (term < 1e-22 * std::max(1.0, s) && j > 4.0 / p) break;
      w *= q;
    }
    return s;
  };
  d.raw_moment = [d](int k) { return d.trunc_moment(k, kInf); };
  d.sample = [p](Rng& rng) { return static_cast<double>(rng.geometric(p)); };
  return d;
}

BaseDistribution beta_dist(double alpha, double beta) {
  if (!(alpha > 0.0 && beta > 0.0)) throw std::domain_error("beta: shapes must be positive");
  BaseDistribution d;
  std::ostringstream n;
  n << "beta:" << alpha << "," << beta;
  d.name = n.str();
  d.mean = alpha / (alpha + beta);
  d.variance = alpha * beta / ((alpha + beta) * (alpha + beta) * (alpha + beta + 1.0));
  d.support_lo = 0.0;
  d.support_hi = 1.0;
  const double a = alpha, b = beta;
  d.density_or_mass = [a, b](double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0) / boost::math::beta(a, b);
  };
  d.cdf = [a, b](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
  };
  d.quantile = [a, b](double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    return boost::math::ibeta_inv(a, b, u);
  };
  // E[X^k 1{X<=x}] = prod_{j<k} (a+j)/(a+b+j) * I_x(a+k, b)
  auto moment_ratio = [a, b](int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= (a + j) / (a + b + j);
    return r;
  };
  d.trunc_moment = [a, b, moment_ratio](int k, double x) {
    if (x <= 0.0) return 0.0;
    const double r = moment_ratio(k);
    if (x >= 1.0) return r;
    return r * boost::math::ibeta(a + k, b, x);
  };
  d.raw_moment = [moment_ratio](int k) { return moment_ratio(k); };
  auto q = d.quantile;
  d.sample = [q](Rng& rng) { return q(rng.uniform_open()); };
  return d;
}

BaseDistribution al_base(double mu, double a, double b) {
  const ALParams p(mu, a, b);
  BaseDistribution d;
  std::ostringstream n;
  n << "al:" << mu << "," << a << "," << b;
  d.name = n.str();
  d.mean = p.mean();
  d.variance = p.variance();
  d.density_or_mass = [p](double x) { return al_pdf(p, x); };
  d.cdf = [p](double x) { return al_cdf(p, x); };
  d.quantile = [p](double u) { return al_quantile(p, u); };
  d.trunc_moment = [p](int k, double x) {
    if (x == -kInf) return 0.0;
    if (x == kInf) return al_raw_moment(p, k);
    return al_trunc_moment(p, k, x);
  };
  d.raw_moment = [p](int k) { return al_raw_moment(p, k); };
  d.sample = [p](Rng& rng) { return al_sample(p, rng); };
  return d;
}

BaseDistribution shift(const BaseDistribution& base, double c) {
  if (base.discrete && !base.atoms.empty()) {
    std::vector<Atom> atoms = base.atoms;
    for (Atom& a : atoms) a.x += c;
    std::ostringstream n;
    n << base.name << "+" << c;
    return discrete_from_atoms(n.str(), atoms);
  }
  BaseDistribution d = base;
  std::ostringstream n;
  n << base.name << "+" << c;
  d.name = n.str();
  d.mean = base.mean + c;
  d.support_lo = base.support_lo + c;
  d.support_hi = base.support_hi + c;
  auto b = std::make_shared<BaseDistribution>(base);
  d.density_or_mass = [b, c](double x) { return b->density_or_mass(x - c); };
  d.cdf = [b, c](double x) { return b->cdf(x - c); };
  d.quantile = [b, c](double u) { return b->quantile(u) + c; };
  d.trunc_moment = [b, c](int k, double x) {
    double total = 0.0;
    for (int j = 0; j <= k; ++j)
      total += binomial(k, j) * std::pow(c, k - j) * b->trunc_moment(j, x - c);
    return total;
  };
  d.raw_moment = [b, c](int k) {
    double total = 0.0;
    for (int j = 0; j <= k; ++j)
      total += binomial(k, j) * std::pow(c, k - j) * b->raw_moment(j);
    return total;
  };
  d.sample = [b, c](Rng& rng) { return b->sample(rng) + c; };
  return d;
}

BaseDistribution scale(const BaseDistribution& base, double c) {
  if (c == 0.0) throw std::domain_error("scale: c must be nonzero");
  if (base.discrete && !base.atoms.empty()) {
    std::vector<Atom> atoms = base.atoms;
    for (Atom& a : atoms) a.x *= c;
    std::ostringstream n;
    n << base.name << "*" << c;
    return discrete_from_atoms(n.str(), atoms);
  }
  BaseDistribution d = base;
  std::ostringstream n;
  n << base.name << "*" << c;
  d.name = n.str();
  d.mean = c * base.mean;
  d.variance = c * c * base.variance;
  if (c > 0.0) {
    d.support_lo = c * base.support_lo;
    d.support_hi = c * base.support_hi;
  } else {
    d.support_lo = c * base.support_hi;
    d.support_hi = c * base.support_lo;
  }
  auto b = std::make_shared<BaseDistribution>(base);
  d.density_or_mass = [b, c](double x) { return b->density_or_mass(x / c) / std::abs(c); };
  if (c > 0.0) {
    d.cdf = [b, c](double x) { return b->cdf(x / c); };
    d.quantile = [b, c](double u) { return c * b->quantile(u); };
    d.trunc_moment = [b, c](int k, double x) { return std::pow(c, k) * b->trunc_moment(k, x / c); };
  } else {
    // continuous base: P(cW <= x) = P(W >= x/c) = 1 - F(x/c)
    d.cdf = [b, c](double x) { return 1.0 - b->cdf(x / c); };
    d.quantile = [b, c](double u) { return c * b->quantile(1.0 - u); };
    d.trunc_moment = [b, c](int k, double x) {
      return std::pow(c, k) * (b->raw_moment(k) - b->trunc_moment(k, x / c));
    };
  }
  d.raw_moment = [b, c](int k) { return std::pow(c, k) * b->raw_moment(k); };
  d.sample = [b, c](Rng& rng) { return c * b->sample(rng); };
  return d;
}

std::vector<BaseDistribution> builtin_bases() {
  std::vector<BaseDistribution> out;
  out.push_back(rademacher());
  out.push_back(rademacher_shifted(0.1));
  out.push_back(uniform_dist(-std::sqrt(3.0), std::sqrt(3.0)));
  out.push_back(normal_dist(0.0, 1.0));
  out.push_back(normal_dist(0.2, 1.0));
  out.push_back(laplace_dist(1.0));
  out.push_back(exponential_unit());
  out.push_back(geometric_dist(0.25));
  out.push_back(beta_dist(1.0, 9.0));
  out.push_back(beta_dist(2.0, 1.0));
  out.push_back(al_base(0.0, 0.5, std::sqrt(0.75)));
  return out;
}

BaseDistribution parse_base(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
  }
  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw std::invalid_argument("parse_base: '" + name + "' expects " + std::to_string(k) +
                                  " parameters");
  };
  if (name == "rademacher") {
    want(0);
    return rademacher();
  }
  if (name == "rademacher_shifted") {
    want(1);
    return rademacher_shifted(args[0]);
  }
  if (name == "twopoint") {
    want(3);
    return two_point(args[0], args[1], args[2]);
  }
  if (name == "uniform") {
    want(2);
    return uniform_dist(args[0], args[1]);
  }
  if (name == "normal") {
    want(2);
    return normal_dist(args[0], args[1]);
  }
  if (name == "laplace") {
    want(1);
    return laplace_dist(args[0]);
  }
  if (name == "exponential") {
    want(0);
    return exponential_unit();
  }
  if (name == "geometric") {
    want(1);
    return geometric_dist(args[0]);
  }
  if (name == "beta") {
    want(2);
    return beta_dist(args[0], args[1]);
  }
  if (name == "al") {
    want(3);
    return al_base(args[0], args[1], args[2]);
  }
  throw std::invalid_argument("parse_base: unknown family '" + name + "'");
}

}  // namespace alap
