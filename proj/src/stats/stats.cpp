#include "ndc/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ndc/rng.hpp"

namespace ndc::stats {

namespace {

// (n+1)-rank quantile with linear interpolation, 1-based ranks
double rank_quantile(const std::vector<double>& sorted, double q) {
  const double n = double(sorted.size());
  const double r = q * (n + 1.0);
  if (r <= 1.0) return sorted.front();
  if (r >= n) return sorted.back();
  const std::size_t k = std::size_t(r);  // floor, >= 1
  const double frac = r - double(k);
  return sorted[k - 1] + frac * (sorted[k] - sorted[k - 1]);
}

}  // namespace

SummaryStats summary_stats(const std::vector<double>& values) {
  if (values.empty()) throw Error("EmptyInput", "summary of an empty sequence");
  SummaryStats s;
  const double n = double(values.size());

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = rank_quantile(sorted, 0.5);
  s.q1 = rank_quantile(sorted, 0.25);
  s.q3 = rank_quantile(sorted, 0.75);
  s.iqr = s.q3 - s.q1;

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  s.mean = mean;
  s.variance = m2;
  s.std = std::sqrt(m2);
  s.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
  s.cv = mean != 0.0 ? s.std / mean : 0.0;

  // longest run of equal values; first (smallest) run wins ties
  s.mode = sorted.front();
  std::size_t best = 0, run = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    run = (i > 0 && sorted[i] == sorted[i - 1]) ? run + 1 : 1;
    if (run > best) {
      best = run;
      s.mode = sorted[i];
    }
  }
  return s;
}

Chi2Result chi_square_uniformity(const std::vector<double>& counts) {
  if (counts.size() < 2) throw Error("TooFewSamples", "need at least 2 counts");
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) throw Error("AllZeroCounts", "chi-square of all-zero counts");
  const double e = total / double(counts.size());
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - e) * (c - e) / e;
  return {chi2, chi_square_pvalue(chi2, double(counts.size()) - 1.0)};
}

double monte_carlo_poisson_pvalue(const std::vector<double>& counts, int n_sims,
                                  std::uint64_t seed) {
  if (counts.size() < 2) throw Error("TooFewSamples", "need at least 2 counts");
  if (n_sims < 100) throw Error("BadParameter", "n_sims must be >= 100");
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) throw Error("AllZeroCounts", "Monte-Carlo test of all-zero counts");
  const double e = total / double(counts.size());

  double observed = 0.0;
  for (double c : counts) observed += (c - e) * (c - e) / e;

  std::mt19937_64 rng(seed);
  int hits = 0;
  for (int s = 0; s < n_sims; ++s) {
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double x = double(poisson_draw(e, rng));
      stat += (x - e) * (x - e) / e;
    }
    if (stat >= observed) ++hits;
  }
  return double(hits) / double(n_sims);
}

double fisher_exact_pvalue(const ContingencyTable& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0)
    throw Error("BadParameter", "negative contingency count");
  const long r1 = t.a + t.b, r2 = t.c + t.d;
  const long c1 = t.a + t.c, c2 = t.b + t.d;
  const long n = r1 + r2;
  if (n <= 0) throw Error("BadParameter", "empty contingency table");
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return 1.0;  // degenerate margins

  auto log_choose = [](long nn, long kk) {
    return std::lgamma(double(nn) + 1.0) - std::lgamma(double(kk) + 1.0) -
           std::lgamma(double(nn - kk) + 1.0);
  };
  auto log_prob = [&](long a) {
    return log_choose(r1, a) + log_choose(r2, c1 - a) - log_choose(n, c1);
  };

  const double lp_obs = log_prob(t.a);
  const long a_lo = std::max(0L, c1 - r2);
  const long a_hi = std::min(r1, c1);
  double p = 0.0;
  for (long a = a_lo; a <= a_hi; ++a) {
    const double lp = log_prob(a);
    if (lp <= lp_obs + 1e-9) p += std::exp(lp);
  }
  return p > 1.0 ? 1.0 : p;
}

KsResult ks_normal_test(const std::vector<double>& sample) {
  const std::size_t n = sample.size();
  if (n < 8) throw Error("TooFewSamples", "K-S test needs n >= 8");
  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= double(n);
  double var = 0.0;
  for (double v : sample) var += (v - mean) * (v - mean);
  var /= double(n);
  const double sd = std::sqrt(var);

  std::vector<double> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // degenerate sample: theoretical cdf collapses to a step at the mean
    const double f = sd > 0.0 ? normal_cdf((sorted[i] - mean) / sd)
                              : (sorted[i] < mean ? 0.0 : (sorted[i] > mean ? 1.0 : 0.5));
    d = std::max(d, std::fabs(double(i + 1) / double(n) - f));
    d = std::max(d, std::fabs(f - double(i) / double(n)));
  }
  KsResult r;
  r.d = d;
  r.p_std = kolmogorov_p(d, n);
  r.p_paper = std::erf(d * std::sqrt(double(n)));
  return r;
}

WelchResult welch_t_test(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2 || y.size() < 2) throw Error("TooFewSamples", "both samples need n >= 2");
  const double n1 = double(x.size()), n2 = double(y.size());
  double m1 = 0.0, m2 = 0.0;
  for (double v : x) m1 += v;
  for (double v : y) m2 += v;
  m1 /= n1;
  m2 /= n2;
  double v1 = 0.0, v2 = 0.0;
  for (double v : x) v1 += (v - m1) * (v - m1);
  for (double v : y) v2 += (v - m2) * (v - m2);
  v1 /= n1;
  v2 /= n2;

  WelchResult r;
  const double denom2 = v1 / n1 + v2 / n2;
  if (denom2 <= 0.0) {
    r.t = m1 == m2 ? 0.0 : 1e30;  // both variances zero
  } else {
    r.t = std::fabs(m1 - m2) / std::sqrt(denom2);
  }
  r.p_paper = 0.5 * (1.0 - std::erf(r.t / std::sqrt(2.0)));
  if (x.size() == y.size()) {
    r.dof = n1 + n2 - 2.0;
  } else if (denom2 > 0.0) {
    const double a = v1 / n1, b = v2 / n2;
    r.dof = denom2 * denom2 / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
  } else {
    r.dof = n1 + n2 - 2.0;
  }
  return r;
}

std::vector<double> hampel_filter(const std::vector<double>& series, int window, double k) {
  if (window < 1 || window % 2 == 0) throw Error("BadParameter", "window must be odd positive");
  const std::size_t n = series.size();
  if (n < std::size_t(window)) return series;
  const int hw = window / 2;
  std::vector<double> out = series;
  std::vector<double> buf, dev;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= std::size_t(hw) ? i - hw : 0;
    const std::size_t hi = std::min(n - 1, i + hw);
    buf.assign(series.begin() + long(lo), series.begin() + long(hi) + 1);
    std::sort(buf.begin(), buf.end());
    const std::size_t m = buf.size();
    const double med = m % 2 ? buf[m / 2] : 0.5 * (buf[m / 2 - 1] + buf[m / 2]);
    dev.resize(m);
    for (std::size_t j = 0; j < m; ++j) dev[j] = std::fabs(buf[j] - med);
    std::sort(dev.begin(), dev.end());
    const double mad = m % 2 ? dev[m / 2] : 0.5 * (dev[m / 2 - 1] + dev[m / 2]);
    if (std::fabs(series[i] - med) > k * 1.4826 * mad) out[i] = med;
  }
  return out;
}

double hist_bhattacharyya(const std::vector<double>& h1, const std::vector<double>& h2) {
  if (h1.size() != h2.size() || h1.empty()) throw Error("BinMismatch", "histogram sizes differ");
  const double n = double(h1.size());
  double s1 = 0.0, s2 = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    s1 += h1[i];
    s2 += h2[i];
    cross += std::sqrt(h1[i] * h2[i]);
  }
  const double m1 = s1 / n, m2 = s2 / n;
  if (m1 <= 0.0 || m2 <= 0.0) return 1.0;
  const double inner = 1.0 - cross / std::sqrt(m1 * m2 * n * n);
  return std::sqrt(std::clamp(inner, 0.0, 1.0));
}

double hist_correlation(const std::vector<double>& h1, const std::vector<double>& h2) {
  if (h1.size() != h2.size() || h1.empty()) throw Error("BinMismatch", "histogram sizes differ");
  const double n = double(h1.size());
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    m1 += h1[i];
    m2 += h2[i];
  }
  m1 /= n;
  m2 /= n;
  double cov = 0.0, v1 = 0.0, v2 = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    cov += (h1[i] - m1) * (h2[i] - m2);
    v1 += (h1[i] - m1) * (h1[i] - m1);
    v2 += (h2[i] - m2) * (h2[i] - m2);
  }
  if (v1 <= 0.0 || v2 <= 0.0) return 0.0;
  return std::clamp(cov / std::sqrt(v1 * v2), -1.0, 1.0);
}

double hist_intersection(const std::vector<double>& h1, const std::vector<double>& h2) {
  if (h1.size() != h2.size() || h1.empty()) throw Error("BinMismatch", "histogram sizes differ");
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    s1 += h1[i];
    s2 += h2[i];
  }
  if (s1 <= 0.0 || s2 <= 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) s += std::min(h1[i] / s1, h2[i] / s2);
  return s;
}

double gaussian_bhattacharyya_1d(double mu1, double var1, double mu2, double var2) {
  if (var1 <= 0.0 && var2 <= 0.0) return mu1 == mu2 ? 0.0 : 1e30;
  const double v1 = std::max(var1, 1e-30);
  const double v2 = std::max(var2, 1e-30);
  const double vbar = 0.5 * (v1 + v2);
  const double d = mu1 - mu2;
  return 0.125 * d * d / vbar + 0.5 * std::log(vbar / std::sqrt(v1 * v2));
}

namespace {

double cholesky_logdet_or_throw(std::vector<double> a, int n, const char* which) {
  std::vector<double> work = a;
  if (!cholesky(work, n)) {
    for (int i = 0; i < n; ++i) a[std::size_t(i) * n + i] += 1e-9;
    work = a;
    if (!cholesky(work, n))
      throw Error("NonPositiveDefinite", std::string(which) + " covariance not PD after ridge");
  }
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(work[std::size_t(i) * n + i]);
  return logdet;
}

}  // namespace

double gaussian_bhattacharyya(const std::vector<double>& mu1, std::vector<double> cov1,
                              const std::vector<double>& mu2, std::vector<double> cov2,
                              int dim) {
  if (int(mu1.size()) != dim || int(mu2.size()) != dim ||
      cov1.size() != std::size_t(dim) * dim || cov2.size() != std::size_t(dim) * dim)
    throw Error("BadParameter", "dimension mismatch");

  const double ld1 = cholesky_logdet_or_throw(cov1, dim, "first");
  const double ld2 = cholesky_logdet_or_throw(cov2, dim, "second");

  std::vector<double> avg(std::size_t(dim) * dim);
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = 0.5 * (cov1[i] + cov2[i]);
  std::vector<double> chol = avg;
  if (!cholesky(chol, dim)) {
    for (int i = 0; i < dim; ++i) avg[std::size_t(i) * dim + i] += 1e-9;
    chol = avg;
    if (!cholesky(chol, dim))
      throw Error("NonPositiveDefinite", "averaged covariance not PD after ridge");
  }
  double ld_avg = 0.0;
  for (int i = 0; i < dim; ++i) ld_avg += 2.0 * std::log(chol[std::size_t(i) * dim + i]);

  // solve L y = d, then quadratic form is y.y after the second solve step
  std::vector<double> y(dim);
  for (int i = 0; i < dim; ++i) {
    double s = mu1[i] - mu2[i];
    for (int j = 0; j < i; ++j) s -= chol[std::size_t(i) * dim + j] * y[j];
    y[i] = s / chol[std::size_t(i) * dim + i];
  }
  double quad = 0.0;
  for (int i = 0; i < dim; ++i) quad += y[i] * y[i];

  return 0.125 * quad + 0.5 * (ld_avg - 0.5 * (ld1 + ld2));
}

}  // namespace ndc::stats
