#pragma once

#include <cstdint>
#include <vector>

#include "ndc/error.hpp"

namespace ndc::stats {

// ---------- summary statistics ----------

struct SummaryStats {
  double mean = 0, variance = 0, std = 0, median = 0, mode = 0;
  double min = 0, max = 0, q1 = 0, q3 = 0, iqr = 0, kurtosis = 0, cv = 0;
};

/// Population variance; quartiles by the (n+1)-rank convention with linear
/// interpolation; mode ties break toward the smallest value; cv = 0 when the
/// mean is 0; kurtosis = 0 when the variance is 0. Throws EmptyInput.
SummaryStats summary_stats(const std::vector<double>& values);

// ---------- hypothesis tests ----------

struct Chi2Result {
  double chi2 = 0;
  double p = 1;
};

/// chi2 = sum (O-E)^2/E with E = mean(counts); p from the chi-square survival
/// function with N-1 degrees of freedom. Throws AllZeroCounts.
Chi2Result chi_square_uniformity(const std::vector<double>& counts);

/// Survival function of the chi-square distribution.
double chi_square_pvalue(double chi2, double dof);

/// p = fraction of simulated Poisson count vectors whose statistic
/// sum (X-E)^2/E reaches the observed statistic. Deterministic per seed.
double monte_carlo_poisson_pvalue(const std::vector<double>& counts, int n_sims,
                                  std::uint64_t seed);

struct ContingencyTable {
  long a = 0, b = 0, c = 0, d = 0;
};

/// Two-sided Fisher exact p over all tables with the observed margins.
/// A zero row or column margin yields p = 1.
double fisher_exact_pvalue(const ContingencyTable& t);

struct KsResult {
  double d = 0;
  double p_std = 1;    // Kolmogorov series
  double p_paper = 0;  // erf(d*sqrt(n)); reported, never used as a gate
};

/// One-sample K-S against a normal with the sample's own mean and population
/// std. Requires n >= 8 (TooFewSamples).
KsResult ks_normal_test(const std::vector<double>& sample);

struct WelchResult {
  double t = 0;
  double p_paper = 0.5;  // (1 - erf(t/sqrt(2)))/2
  double dof = 0;
};

/// |mean gap| t statistic with population variances; dof = n1+n2-2 for equal
/// sizes, Welch-Satterthwaite otherwise. Both samples need n >= 2.
WelchResult welch_t_test(const std::vector<double>& x, const std::vector<double>& y);

/// Sliding-window median/MAD replacement (window clamped at the edges).
/// Series shorter than the window are returned unchanged.
std::vector<double> hampel_filter(const std::vector<double>& series, int window = 5,
                                  double k = 3.0);

// ---------- histogram distances ----------

/// Mean-bin normalized Bhattacharyya distance in [0,1]; 0 for identical
/// histograms, 1 for disjoint supports. Throws BinMismatch.
double hist_bhattacharyya(const std::vector<double>& h1, const std::vector<double>& h2);

/// Pearson correlation of bin values; 0 when either histogram is constant.
double hist_correlation(const std::vector<double>& h1, const std::vector<double>& h2);

/// Overlap of sum-normalized histograms, in [0,1].
double hist_intersection(const std::vector<double>& h1, const std::vector<double>& h2);

/// Bhattacharyya distance between two univariate Gaussians (averaged-variance
/// form, identical inputs give exactly 0).
double gaussian_bhattacharyya_1d(double mu1, double var1, double mu2, double var2);

/// Multivariate form; covariances row-major dim*dim. A ridge of 1e-9 I is
/// added when a covariance is not positive definite; throws
/// NonPositiveDefinite if that does not fix it.
double gaussian_bhattacharyya(const std::vector<double>& mu1, std::vector<double> cov1,
                              const std::vector<double>& mu2, std::vector<double> cov2,
                              int dim);

// ---------- distribution fitting ----------

struct GaussianMixture {
  int K = 0;
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
};

struct EmConfig {
  int max_iter = 500;
  double rel_tol = 1e-6;
  double var_floor_factor = 1e-6;  // times the sample variance
  std::uint64_t seed = 0;
};

struct EmResult {
  GaussianMixture model;
  std::vector<double> loglik_path;  // per-iteration log-likelihood
};

/// EM with k-means++-style mean seeding, equal initial weights and pooled
/// variance. Log-likelihood is nondecreasing across iterations.
EmResult gmm_fit_em(const std::vector<double>& samples, int K, const EmConfig& cfg = {});

double gmm_loglik(const GaussianMixture& m, double x);

enum class PdfFamily { weibull, gumbel, gmm };

struct FittedPdf {
  PdfFamily family = PdfFamily::gumbel;
  double p1 = 0;  // weibull: shape k; gumbel: location mu
  double p2 = 1;  // weibull: scale lambda; gumbel: scale beta
  double shift = 0;  // weibull evaluation offset (support fix for zeros)
  GaussianMixture gmm;
};

/// Shape-parameter MLE by fixed-point iteration, moment-based start.
/// Inputs containing values <= 0 are shifted by +1 (recorded in .shift);
/// throws NonPositiveSamples if that is not enough, TooFewSamples below 8.
FittedPdf weibull_fit(const std::vector<double>& samples);

/// Moment fit: beta = s*sqrt(6)/pi, mu = mean - 0.5772157*beta.
FittedPdf gumbel_fit(const std::vector<double>& samples);

/// Natural log density; x outside the support yields -1e30.
double pdf_loglik(const FittedPdf& model, double x);

// ---------- shared numerics ----------

double regularized_gamma_q(double a, double x);   // upper incomplete, normalized
double kolmogorov_p(double d, std::size_t n);     // 2*sum (-1)^{k-1} exp(-2k^2nd^2)
double normal_cdf(double z);
double log_sum_exp(const std::vector<double>& xs);

/// In-place lower Cholesky of a row-major symmetric matrix; false if not PD.
bool cholesky(std::vector<double>& a, int n);

constexpr double kNegInfLoglik = -1e30;

}  // namespace ndc::stats
