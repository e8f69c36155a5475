#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ndc/rng.hpp"
#include "ndc/stats.hpp"

namespace ndc::stats {

namespace {

constexpr int kItMax = 500;
constexpr double kEps = 1e-15;

// series expansion of the lower regularized incomplete gamma P(a,x)
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kItMax; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for the upper regularized incomplete gamma Q(a,x)
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kItMax; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_pvalue(double chi2, double dof) {
  if (chi2 <= 0.0) return 1.0;
  return regularized_gamma_q(dof / 2.0, chi2 / 2.0);
}

double kolmogorov_p(double d, std::size_t n) {
  const double t = double(n) * d * d;
  if (t < 1e-12) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * double(k) * double(k) * t);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  const double p = 2.0 * sum;
  return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

bool cholesky(std::vector<double>& a, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[std::size_t(i) * n + j];
      for (int k = 0; k < j; ++k) s -= a[std::size_t(i) * n + k] * a[std::size_t(j) * n + k];
      if (i == j) {
        if (s <= 0.0) return false;
        a[std::size_t(i) * n + j] = std::sqrt(s);
      } else {
        a[std::size_t(i) * n + j] = s / a[std::size_t(j) * n + j];
      }
    }
    for (int j = i + 1; j < n; ++j) a[std::size_t(i) * n + j] = 0.0;
  }
  return true;
}

}  // namespace ndc::stats

namespace ndc {

long poisson_draw(double lambda, std::mt19937_64& rng) {
  if (lambda <= 0.0) return 0;
  long total = 0;
  // split large rates so exp(-chunk) stays well away from underflow
  while (lambda > 15.0) {
    const double chunk = lambda > 30.0 ? 15.0 : lambda / 2.0;
    lambda -= chunk;
    const double limit = std::exp(-chunk);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double prod = uni(rng);
    long k = 0;
    while (prod > limit) {
      ++k;
      prod *= uni(rng);
    }
    total += k;
  }
  const double limit = std::exp(-lambda);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double prod = uni(rng);
  long k = 0;
  while (prod > limit) {
    ++k;
    prod *= uni(rng);
  }
  return total + k;
}

}  // namespace ndc
