#include "alap/al.hpp"

#include <cmath>
#include <stdexcept>

namespace alap {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// exp(-z) * sum_{j=0}^{k} z^j/j!  (upper-tail factor of the incomplete gamma)
double exp_partial_sum(int k, double z) {
  double term = 1.0, sum = 1.0;
  for (int j = 1; j <= k; ++j) {
    term *= z / j;
    sum += term;
  }
  return std::exp(-z) * sum;
}

// E[W^k 1{W <= x}] for W ~ AL(0,a,b).
double trunc_moment_centred(const ALParams& p, int k, double x) {
  const double al = p.alpha(), be = p.beta();
  const double lam = al + be;  // left tail rate
  const double nu = al - be;   // right tail rate
  const double c = 1.0 / std::sqrt(2.0 * p.b * p.b + p.a * p.a);
  const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
  const double t0 = c * sgn * factorial(k) / std::pow(lam, k + 1);
  if (x <= 0.0) return c * sgn * factorial(k) / std::pow(lam, k + 1) * exp_partial_sum(k, -lam * x);
  return t0 + c * factorial(k) / std::pow(nu, k + 1) * (1.0 - exp_partial_sum(k, nu * x));
}

double raw_moment_centred(const ALParams& p, int k) {
  const double al = p.alpha(), be = p.beta();
  const double c = 1.0 / std::sqrt(2.0 * p.b * p.b + p.a * p.a);
  const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
  return c * factorial(k) *
         (1.0 / std::pow(al - be, k + 1) + sgn / std::pow(al + be, k + 1));
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

ALParams::ALParams(double mu_, double a_, double b_) : mu(mu_), a(a_), b(b_) {
  if (!(b > 0.0) || !std::isfinite(b) || !std::isfinite(a) || !std::isfinite(mu))
    throw std::domain_error("ALParams: b must be positive and all parameters finite");
}

double al_pdf(const ALParams& p, double x) {
  const double y = x - p.mu;
  return std::exp(p.beta() * y - p.alpha() * std::abs(y)) /
         std::sqrt(2.0 * p.b * p.b + p.a * p.a);
}

double al_cdf(const ALParams& p, double x) {
  const double y = x - p.mu;
  const double al = p.alpha(), be = p.beta();
  if (y < 0.0) return ((al - be) / (2.0 * al)) * std::exp((al + be) * y);
  return 1.0 - ((al + be) / (2.0 * al)) * std::exp(-(al - be) * y);
}

double al_quantile(const ALParams& p, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("al_quantile: u must lie in (0,1)");
  const double al = p.alpha(), be = p.beta();
  const double u0 = (al - be) / (2.0 * al);
  if (u <= u0) return p.mu + std::log(2.0 * al * u / (al - be)) / (al + be);
  return p.mu - std::log(2.0 * al * (1.0 - u) / (al + be)) / (al - be);
}

std::complex<double> al_cf(const ALParams& p, double t) {
  const std::complex<double> i(0.0, 1.0);
  return std::exp(i * (p.mu * t)) / (1.0 + 0.5 * p.b * p.b * t * t - i * (p.a * t));
}

double al_sample(const ALParams& p, Rng& rng) {
  const double x = rng.exponential();
  const double n = rng.normal();
  return p.mu + p.a * x + p.b * std::sqrt(x) * n;
}

double al_trunc_moment(const ALParams& p, int k, double x) {
  if (k < 0) throw std::domain_error("al_trunc_moment: k must be >= 0");
  if (p.mu == 0.0) return trunc_moment_centred(p, k, x);
  // shift: E[(Y+mu)^k 1{Y <= x-mu}] expanded binomially about the centred law
  const ALParams c0(0.0, p.a, p.b);
  double total = 0.0;
  for (int j = 0; j <= k; ++j)
    total += binomial(k, j) * std::pow(p.mu, k - j) * trunc_moment_centred(c0, j, x - p.mu);
  return total;
}

double al_raw_moment(const ALParams& p, int k) {
  if (k < 0) throw std::domain_error("al_raw_moment: k must be >= 0");
  if (p.mu == 0.0) return raw_moment_centred(p, k);
  const ALParams c0(0.0, p.a, p.b);
  double total = 0.0;
  for (int j = 0; j <= k; ++j)
    total += binomial(k, j) * std::pow(p.mu, k - j) * raw_moment_centred(c0, j);
  return total;
}

double al_abs_moment(const ALParams& p, int k) {
  if (k == 0) return 1.0;
  if (k % 2 == 0 && p.mu == 0.0) return al_raw_moment(p, k);
  if (p.mu == 0.0) {
    const double al = p.alpha(), be = p.beta();
    const double c = 1.0 / std::sqrt(2.0 * p.b * p.b + p.a * p.a);
    return c * factorial(k) *
           (1.0 / std::pow(al - be, k + 1) + 1.0 / std::pow(al + be, k + 1));
  }
  // |w|^k = w^k - 2 w^k 1{w<=0} for odd k; even k is the raw moment.
  if (k % 2 == 0) return al_raw_moment(p, k);
  return al_raw_moment(p, k) - 2.0 * al_trunc_moment(p, k, 0.0);
}

double al_signed_abs_moment(const ALParams& p, int k) {
  if (k == 0) return 1.0 - 2.0 * al_cdf(p, 0.0);
  if (k % 2 == 1) return al_raw_moment(p, k);
  return al_raw_moment(p, k) - 2.0 * al_trunc_moment(p, k, 0.0);
}

}  // namespace alap
