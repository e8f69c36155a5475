#include <algorithm>
#include <cmath>
#include <random>

#include "ndc/rng.hpp"
#include "ndc/stats.hpp"

namespace ndc::stats {

namespace {

inline double log_normal_pdf(double x, double mu, double var) {
  const double d = x - mu;
  return -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
}

// squared-distance-weighted seeding of component means
std::vector<double> kmeanspp_means(const std::vector<double>& xs, int k, std::mt19937_64& rng) {
  std::vector<double> means;
  means.reserve(k);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  means.push_back(xs[pick(rng)]);
  std::vector<double> d2(xs.size());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  while (int(means.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double m : means) best = std::min(best, (xs[i] - m) * (xs[i] - m));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      means.push_back(xs[pick(rng)]);
      continue;
    }
    double target = uni(rng) * total;
    std::size_t idx = 0;
    for (; idx + 1 < xs.size(); ++idx) {
      target -= d2[idx];
      if (target <= 0.0) break;
    }
    means.push_back(xs[idx]);
  }
  return means;
}

}  // namespace

double gmm_loglik(const GaussianMixture& m, double x) {
  std::vector<double> terms(m.K);
  for (int k = 0; k < m.K; ++k) {
    const double w = m.weights[k];
    terms[k] = w > 0.0 ? std::log(w) + log_normal_pdf(x, m.means[k], m.variances[k])
                       : kNegInfLoglik;
  }
  const double ll = log_sum_exp(terms);
  return std::isfinite(ll) ? std::max(ll, kNegInfLoglik) : kNegInfLoglik;
}

EmResult gmm_fit_em(const std::vector<double>& samples, int K, const EmConfig& cfg) {
  const std::size_t n = samples.size();
  if (K < 1) throw Error("BadParameter", "K must be >= 1");
  if (n < std::size_t(K)) throw Error("TooFewSamples", "need at least K samples");

  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= double(n);
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= double(n);
  const double floor = std::max(cfg.var_floor_factor * var, 1e-12);

  std::mt19937_64 rng(cfg.seed);
  GaussianMixture m;
  m.K = K;
  m.means = kmeanspp_means(samples, K, rng);
  m.weights.assign(K, 1.0 / K);
  m.variances.assign(K, std::max(var, floor));

  EmResult res;
  std::vector<double> logw(K), logp(K);
  std::vector<double> nk(K), mu_acc(K), var_acc(K);
  std::vector<double> gamma(std::size_t(K) * n);

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    // E-step
    for (int k = 0; k < K; ++k)
      logw[k] = m.weights[k] > 0.0 ? std::log(m.weights[k]) : -1e300;
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k)
        logp[k] = logw[k] + log_normal_pdf(samples[i], m.means[k], m.variances[k]);
      const double lse = log_sum_exp(logp);
      ll += lse;
      for (int k = 0; k < K; ++k) gamma[std::size_t(k) * n + i] = std::exp(logp[k] - lse);
    }
    res.loglik_path.push_back(ll);

    // M-step
    for (int k = 0; k < K; ++k) {
      nk[k] = 0.0;
      mu_acc[k] = 0.0;
    }
    for (int k = 0; k < K; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        nk[k] += gamma[std::size_t(k) * n + i];
        mu_acc[k] += gamma[std::size_t(k) * n + i] * samples[i];
      }
    for (int k = 0; k < K; ++k) {
      if (nk[k] > 1e-12) {
        m.means[k] = mu_acc[k] / nk[k];
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = samples[i] - m.means[k];
          v += gamma[std::size_t(k) * n + i] * d * d;
        }
        m.variances[k] = std::max(v / nk[k], floor);
        m.weights[k] = nk[k] / double(n);
      } else {
        m.weights[k] = 0.0;  // dead component keeps its parameters
      }
    }
    double wsum = 0.0;
    for (double w : m.weights) wsum += w;
    for (double& w : m.weights) w /= wsum;

    if (iter > 0 && std::fabs(ll - prev_ll) <= cfg.rel_tol * std::fabs(ll)) break;
    prev_ll = ll;
  }
  res.model = m;
  return res;
}

FittedPdf weibull_fit(const std::vector<double>& samples) {
  if (samples.size() < 8) throw Error("TooFewSamples", "Weibull fit needs n >= 8");
  double mn = samples.front();
  for (double x : samples) mn = std::min(mn, x);
  double shift = 0.0;
  if (mn <= 0.0) {
    shift = 1.0;
    if (mn + shift <= 0.0)
      throw Error("NonPositiveSamples", "samples nonpositive even after +1 shift");
  }

  const std::size_t n = samples.size();
  std::vector<double> lx(n);
  double mean = 0.0, mean_log = 0.0, max_log = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = samples[i] + shift;
    lx[i] = std::log(x);
    mean += x;
    mean_log += lx[i];
    max_log = std::max(max_log, lx[i]);
  }
  mean /= double(n);
  mean_log /= double(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = samples[i] + shift;
    var += (x - mean) * (x - mean);
  }
  var /= double(n);

  const double cv = mean > 0.0 ? std::sqrt(var) / mean : 1.0;
  double k = cv > 0.0 ? std::pow(cv, -1.086) : 50.0;
  k = std::clamp(k, 1e-2, 1e3);

  // fixed point for the shape MLE, computed with a shifted exponent so
  // x^k never overflows
  for (int iter = 0; iter < 200; ++iter) {
    double sw = 0.0, swl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = std::exp(k * (lx[i] - max_log));
      sw += w;
      swl += w * lx[i];
    }
    const double a = swl / sw - mean_log;
    if (a <= 1e-12) break;  // degenerate (near-constant) sample
    double k_new = 1.0 / a;
    k_new = std::clamp(k_new, k / 3.0, k * 3.0);
    k_new = std::clamp(k_new, 1e-3, 1e3);
    const double delta = std::fabs(k_new - k);
    k = k_new;
    if (delta <= 1e-8 * std::max(1.0, k)) break;
  }

  // lambda = (mean of x^k)^(1/k), evaluated in the log domain
  double sw = 0.0;
  for (std::size_t i = 0; i < n; ++i) sw += std::exp(k * (lx[i] - max_log));
  const double log_lambda = (std::log(sw / double(n))) / k + max_log;

  FittedPdf f;
  f.family = PdfFamily::weibull;
  f.p1 = k;
  f.p2 = std::exp(log_lambda);
  f.shift = shift;
  return f;
}

FittedPdf gumbel_fit(const std::vector<double>& samples) {
  if (samples.size() < 8) throw Error("TooFewSamples", "Gumbel fit needs n >= 8");
  const double n = double(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= n;

  FittedPdf f;
  f.family = PdfFamily::gumbel;
  f.p2 = std::max(std::sqrt(var) * std::sqrt(6.0) / M_PI, 1e-12);
  f.p1 = mean - 0.5772157 * f.p2;
  return f;
}

double pdf_loglik(const FittedPdf& model, double x) {
  double ll = kNegInfLoglik;
  switch (model.family) {
    case PdfFamily::weibull: {
      const double y = x + model.shift;
      if (y <= 0.0) return kNegInfLoglik;
      const double k = model.p1, lambda = model.p2;
      const double lr = std::log(y) - std::log(lambda);
      const double pow_term = std::exp(k * lr);
      ll = std::log(k) - std::log(lambda) + (k - 1.0) * lr - pow_term;
      break;
    }
    case PdfFamily::gumbel: {
      const double z = (x - model.p1) / model.p2;
      ll = -std::log(model.p2) - z - std::exp(-z);
      break;
    }
    case PdfFamily::gmm:
      ll = gmm_loglik(model.gmm, x);
      break;
  }
  if (!std::isfinite(ll)) return kNegInfLoglik;
  return std::max(ll, kNegInfLoglik);
}

}  // namespace ndc::stats
