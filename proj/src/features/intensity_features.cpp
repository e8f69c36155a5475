// Extractors over raw intensities: robust dispersion, reference-model
// likelihoods, histogram comparisons, and plain summary metrics.
#include <algorithm>
#include <cmath>

#include "ndc/features.hpp"
#include "ndc/kernels.hpp"

namespace ndc::features {

namespace {

std::vector<double> pixel_values(const GrayImage& img) {
  std::vector<double> v(img.pixels.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(img.pixels[i]);
  return v;
}

// per-pixel population variance over a clamped square window, via integral images
std::vector<double> local_variance(const GrayImage& img, int window) {
  const int w = img.width, h = img.height;
  const int hw = window / 2;
  std::vector<double> integ(std::size_t(w + 1) * (h + 1), 0.0);
  std::vector<double> integ2(std::size_t(w + 1) * (h + 1), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double v = double(img.at(x, y));
      const std::size_t at = std::size_t(y + 1) * (w + 1) + (x + 1);
      integ[at] = v + integ[at - 1] + integ[at - (w + 1)] - integ[at - (w + 1) - 1];
      integ2[at] = v * v + integ2[at - 1] + integ2[at - (w + 1)] - integ2[at - (w + 1) - 1];
    }
  auto box = [&](const std::vector<double>& s, int x0, int y0, int x1, int y1) {
    return s[std::size_t(y1) * (w + 1) + x1] - s[std::size_t(y0) * (w + 1) + x1] -
           s[std::size_t(y1) * (w + 1) + x0] + s[std::size_t(y0) * (w + 1) + x0];
  };
  std::vector<double> out(std::size_t(w) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - hw), x1 = std::min(w, x + hw + 1);
      const int y0 = std::max(0, y - hw), y1 = std::min(h, y + hw + 1);
      const double n = double(x1 - x0) * double(y1 - y0);
      const double s = box(integ, x0, y0, x1, y1);
      const double s2 = box(integ2, x0, y0, x1, y1);
      out[std::size_t(y) * w + x] = std::max(0.0, s2 / n - (s / n) * (s / n));
    }
  return out;
}

}  // namespace

IqrFeatures f_iqr(const GrayImage& img, const ExtractorConfig& cfg) {
  IqrFeatures f;
  const stats::SummaryStats ss = stats::summary_stats(pixel_values(img));
  const double c1 = cfg.iqr_a * 1.5 * ss.iqr;
  const double c2 = cfg.iqr_b * 1.5 * ss.iqr;
  const std::vector<double> lvar = local_variance(img, cfg.local_var_window);

  long outliers = 0, noise = 0, defect = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double u = double(img.at(x, y));
      const bool outlier = u < ss.q1 - c1 || u > ss.q3 + c2;
      if (!outlier) continue;
      ++outliers;
      if (lvar[std::size_t(y) * img.width + x] < cfg.lambda_noise)
        ++noise;
      else
        ++defect;
    }
  const double mn = double(img.pixels.size());
  f.outlier_ratio = double(outliers) / mn;
  f.noise_ratio = double(noise) / mn;
  f.defect_ratio = double(defect) / mn;
  return f;
}

GmmPosteriorFeatures f_gmm_posterior(const GrayImage& img, const ReferenceModels* ref,
                                     const ExtractorConfig& cfg) {
  (void)cfg;
  GmmPosteriorFeatures f;  // (0.5, 0.5) when the reference is missing
  if (ref == nullptr || ref->tp_gmm.gmm.K == 0 || ref->fp_gmm.gmm.K == 0) return f;

  double ll_tp = 0.0, ll_fp = 0.0;
  for (std::uint16_t p : img.pixels) {
    ll_tp += stats::gmm_loglik(ref->tp_gmm.gmm, double(p));
    ll_fp += stats::gmm_loglik(ref->fp_gmm.gmm, double(p));
  }
  const double n = double(img.pixels.size());
  const double log_adj_defect = ll_tp / n + std::log(ref->prior_defect);
  const double log_adj_noise = ll_fp / n + std::log(ref->prior_noise);

  const double z = std::clamp(log_adj_noise - log_adj_defect, -700.0, 700.0);
  f.post_defect = 1.0 / (1.0 + std::exp(z));
  f.post_noise = 1.0 - f.post_defect;
  return f;
}

namespace {

constexpr double kCubeClamp = 1e10;

struct FamilyScores {
  double total = 0.0;  // sum of log-likelihoods
  double cubed = 0.0;  // sum of clamped cubes / n
};

FamilyScores score_family(const stats::FittedPdf& pdf, const GrayImage& img) {
  FamilyScores s;
  for (std::uint16_t p : img.pixels) {
    const double ll = stats::pdf_loglik(pdf, double(p));
    s.total += ll;
    const double c = std::clamp(ll, -kCubeClamp, kCubeClamp);
    s.cubed += c * c * c;
  }
  const double n = double(img.pixels.size());
  s.cubed /= n;
  return s;
}

}  // namespace

HistLikelihoodFeatures f_hist_likelihood(const GrayImage& img, const ReferenceModels* ref,
                                         const ExtractorConfig& cfg) {
  (void)cfg;
  HistLikelihoodFeatures f;  // zeros, best_class 0.5
  if (ref == nullptr) return f;

  const stats::FittedPdf* tp[3] = {&ref->tp_weibull, &ref->tp_gumbel, &ref->tp_gmm};
  const stats::FittedPdf* fp[3] = {&ref->fp_weibull, &ref->fp_gumbel, &ref->fp_gmm};
  FamilyScores s_tp[3], s_fp[3];
  for (int k = 0; k < 3; ++k) {
    s_tp[k] = score_family(*tp[k], img);
    s_fp[k] = score_family(*fp[k], img);
  }
  f.s_tp_w = s_tp[0].cubed;
  f.s_fp_w = s_fp[0].cubed;
  f.s_tp_g = s_tp[1].cubed;
  f.s_fp_g = s_fp[1].cubed;
  f.s_tp_m = s_tp[2].cubed;
  f.s_fp_m = s_fp[2].cubed;

  // best family per class by total log-likelihood
  int best_tp = 0, best_fp = 0;
  for (int k = 1; k < 3; ++k) {
    if (s_tp[k].total > s_tp[best_tp].total) best_tp = k;
    if (s_fp[k].total > s_fp[best_fp].total) best_fp = k;
  }

  const double tot_tp = s_tp[best_tp].total;
  const double tot_fp = s_fp[best_fp].total;
  long n_tp = 0;
  if (std::fabs(tot_tp) > 1e-300 && std::fabs(tot_fp) > 1e-300) {
    for (std::uint16_t p : img.pixels) {
      const double lt = stats::pdf_loglik(*tp[best_tp], double(p)) / tot_tp;
      const double lf = stats::pdf_loglik(*fp[best_fp], double(p)) / tot_fp;
      if (lt > lf) ++n_tp;
    }
  }
  f.n_tp_frac = double(n_tp) / double(img.pixels.size());

  // overall best family drives the cubed-sum class comparison
  const int best = s_tp[best_tp].total >= s_fp[best_fp].total ? best_tp : best_fp;
  const double stp = s_tp[best].cubed, sfp = s_fp[best].cubed;
  f.best_class = stp > sfp ? 1.0 : (stp < sfp ? 0.0 : 0.5);
  return f;
}

HistDistanceFeatures f_hist_distance(const GrayImage& img, const ReferenceModels* ref) {
  HistDistanceFeatures f;  // 0.5 sentinels
  if (ref == nullptr || ref->tp_median_hist.bins.empty() || ref->fp_median_hist.bins.empty())
    return f;
  const Histogram h = histogram(img, int(ref->tp_median_hist.bins.size()));
  f.bhat_tp = stats::hist_bhattacharyya(h.bins, ref->tp_median_hist.bins);
  f.bhat_fp = stats::hist_bhattacharyya(h.bins, ref->fp_median_hist.bins);
  f.corr_tp = stats::hist_correlation(h.bins, ref->tp_median_hist.bins);
  f.corr_fp = stats::hist_correlation(h.bins, ref->fp_median_hist.bins);
  f.inter_tp = stats::hist_intersection(h.bins, ref->tp_median_hist.bins);
  f.inter_fp = stats::hist_intersection(h.bins, ref->fp_median_hist.bins);
  return f;
}

namespace {

// mean absolute covariance over column pairs, columns as variables
double column_pair_covariance(const Grid& g) {
  const int w = g.width, h = g.height;
  if (w < 2) return 0.0;
  // transpose so each variable is a contiguous run
  std::vector<float> t(std::size_t(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) t[std::size_t(x) * h + y] = g.at(x, y);
  std::vector<double> mean(std::size_t(w), 0.0);
  for (int x = 0; x < w; ++x) mean[std::size_t(x)] = kern::sum(&t[std::size_t(x) * h], h) / h;

  double acc = 0.0;
  long pairs = 0;
  for (int i = 0; i < w; ++i)
    for (int j = i + 1; j < w; ++j) {
      const double dot = kern::dot(&t[std::size_t(i) * h], &t[std::size_t(j) * h], h);
      acc += std::fabs(dot / h - mean[std::size_t(i)] * mean[std::size_t(j)]);
      ++pairs;
    }
  return acc / double(pairs);
}

}  // namespace

BasicStatsFeatures f_basic_stats(const GrayImage& img) {
  BasicStatsFeatures f;
  const stats::SummaryStats ss = stats::summary_stats(pixel_values(img));
  const double l = double(img.max_value());
  f.dynamic_range = (ss.max - ss.min) / l;
  f.mean = ss.mean / l;
  f.mode = ss.mode / l;
  f.median = ss.median / l;
  f.max = ss.max / l;
  f.variance = ss.variance / (l * l);
  f.cv = ss.cv;

  const Grid g = to_grid(img);
  const double num = column_pair_covariance(g);
  if (num > 0.0) {
    const double den = std::max(column_pair_covariance(convolve2d(g, laplacian_kernel())), 1e-9);
    f.crlf = num / den;
  }
  return f;
}

TextureFeatures f_texture(const GrayImage& img) {
  TextureFeatures f;
  const Histogram h = histogram(img, 256);
  const std::vector<double> p = h.normalized();

  double entropy = 0.0;
  std::size_t mode_bin = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) entropy -= p[i] * std::log2(p[i]);
    if (p[i] > p[mode_bin]) mode_bin = i;
  }
  f.entropy = entropy;

  double homogeneity = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    homogeneity += p[i] / (1.0 + std::fabs(double(i) - double(mode_bin)));
  f.homogeneity = homogeneity;

  const Grid g = to_grid(img);
  const double l = double(img.max_value());
  f.energy = kern::sumsq(g.v.data(), g.v.size()) / (double(img.pixels.size()) * l * l);

  const stats::SummaryStats ss = stats::summary_stats(pixel_values(img));
  f.contrast = ss.std / l;
  f.kurtosis = ss.kurtosis;
  return f;
}

}  // namespace ndc::features
