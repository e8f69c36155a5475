#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ndc/imaging.hpp"
#include "ndc/stats.hpp"

namespace ndc::features {

struct ExtractorConfig {
  int lost_thresh = -1;            // -1: 8 scaled by bit depth
  double loss_count_lambda = 32;   // hard-class threshold, pixels
  int patch_grid = 4;              // 4 or 8 patches per axis
  int patch_min_black = 1;         // epsilon: a patch counts when B_i >= this
  double iqr_a = 1.0;
  double iqr_b = 1.0;
  int local_var_window = 5;
  double lambda_noise = 500.0;     // local-variance split, intensity^2
  int gmm_K = 2;
  int proximity_sims = 200;
  int proximity_max_pairs = 10000;
  int conn_a_min = 1;              // minimum component area kept
  double tv_alpha = 1.0;
  double tv_beta = 1.0;
  double gabor_lambda = 8.0;
  double gabor_sigma = 4.48;       // 0.56 * lambda
  double gabor_gamma = 0.5;
  double gabor_psi = 0.0;
  int hog_cell = 8;
  int hog_bins = 9;
  int cooc_levels = 32;
  double clahe_clip = 2.0;
  int clahe_tiles = 8;
  double prior_noise = 0.35;  // class prior for the reference models
  std::uint64_t seed = 0;

  void validate() const;
};

// ---------- registry ----------

inline constexpr const char* kRegistryVersion = "1";

struct FeatureDescriptor {
  int index = 0;
  std::string name;
  std::string category;
};

const std::vector<FeatureDescriptor>& registry();
std::size_t registry_size();
int registry_index(const std::string& name);  // -1 when unknown

struct FeatureVector {
  std::vector<double> values;
  std::string registry_version = kRegistryVersion;
};

// ---------- reference models ----------

struct ReferenceModels {
  Histogram tp_median_hist;  // defect class
  Histogram fp_median_hist;  // noise class
  stats::FittedPdf tp_weibull, tp_gumbel, tp_gmm;
  stats::FittedPdf fp_weibull, fp_gumbel, fp_gmm;
  double loss_mu_defect = 0, loss_var_defect = 0;
  double loss_mu_noise = 0, loss_var_noise = 0;
  double prior_noise = 0.35;
  double prior_defect = 0.65;
};

/// Bin-wise median histograms per class, PDFs fitted to bin-center
/// reconstituted samples, lost-count moments, and priors.
ReferenceModels build_reference_models(const std::vector<GrayImage>& defect_images,
                                       const std::vector<GrayImage>& noise_images,
                                       const ExtractorConfig& cfg);

// ---------- extractors ----------

struct PixelLossFeatures {
  double a0_ratio = 0, hard_class = 0, loglik_ratio = 0;
};
PixelLossFeatures f_pixel_loss(const GrayImage& img, const ReferenceModels* ref,
                               const ExtractorConfig& cfg);

struct UniformityFeatures {
  double chi2_p = 1, mc_p = 1, fisher_p = 1;
};
UniformityFeatures f_uniformity(const GrayImage& img, const ExtractorConfig& cfg);

struct IqrFeatures {
  double outlier_ratio = 0, noise_ratio = 0, defect_ratio = 0;
};
IqrFeatures f_iqr(const GrayImage& img, const ExtractorConfig& cfg);

struct GmmPosteriorFeatures {
  double post_noise = 0.5, post_defect = 0.5;
};
GmmPosteriorFeatures f_gmm_posterior(const GrayImage& img, const ReferenceModels* ref,
                                     const ExtractorConfig& cfg);

struct ProximityFeatures {
  double mean_d_euclid = 0, mean_d_manhattan = 0, mean_d_chebyshev = 0, uniform_p = 1;
};
ProximityFeatures f_proximity(const GrayImage& img, const ExtractorConfig& cfg);

struct ConnectivityFeatures {
  double r_isolated_4 = 0, r_isolated_8 = 0, n_components_ratio = 0;
};
ConnectivityFeatures f_connectivity(const GrayImage& img, const ExtractorConfig& cfg);

struct HistLikelihoodFeatures {
  double n_tp_frac = 0;
  double s_tp_w = 0, s_fp_w = 0, s_tp_g = 0, s_fp_g = 0, s_tp_m = 0, s_fp_m = 0;
  double best_class = 0.5;
};
HistLikelihoodFeatures f_hist_likelihood(const GrayImage& img, const ReferenceModels* ref,
                                         const ExtractorConfig& cfg);

struct CentroidFeatures {
  double cx_norm = 0.5, cy_norm = 0.5, spread_norm = 0;
};
CentroidFeatures f_centroid(const GrayImage& img, const ExtractorConfig& cfg);

struct TvFeatures {
  double tv_row = 0, tv_col = 0, tv_diag = 0;
  double int_row = 0, int_col = 0, int_diag = 0;
  double tv_combined = 0, int_combined = 0, d_combined = 0;
};
TvFeatures f_tv(const GrayImage& img, const ExtractorConfig& cfg);

struct HistDistanceFeatures {
  double bhat_tp = 0.5, bhat_fp = 0.5, corr_tp = 0.5, corr_fp = 0.5, inter_tp = 0.5,
         inter_fp = 0.5;
};
HistDistanceFeatures f_hist_distance(const GrayImage& img, const ReferenceModels* ref);

double f_pointloss_spread(const GrayImage& img, const ExtractorConfig& cfg);

/// Max SSIM of the ROI against its four same-size neighbors in the parent
/// image (clipped; neighbors keeping under half their area are skipped).
double f_ssim_neighbors(const GrayImage& parent, const Roi& roi);

struct BasicStatsFeatures {
  double dynamic_range = 0, mean = 0, mode = 0, median = 0, max = 0, variance = 0, cv = 0,
         crlf = 0;
};
BasicStatsFeatures f_basic_stats(const GrayImage& img);

struct TextureFeatures {
  double entropy = 0, energy = 0, homogeneity = 1, contrast = 0, kurtosis = 0;
};
TextureFeatures f_texture(const GrayImage& img);

struct GaborFeatures {
  double energy = 0, variance = 0;
};
GaborFeatures f_gabor(const GrayImage& img, const ExtractorConfig& cfg);

double f_homomorphic(const GrayImage& img);

struct HogFieldFeatures {
  double orient_variance = 0, div_l1 = 0, div_l2 = 0, curl_l1 = 0, curl_l2 = 0;
};
HogFieldFeatures f_hog_field(const GrayImage& img, const ExtractorConfig& cfg);

double f_lbp(const GrayImage& img, const ExtractorConfig& cfg);

std::array<double, 30> f_cooccurrence(const GrayImage& img, const ExtractorConfig& cfg);

/// All extractors concatenated in registry order; every value finite.
FeatureVector extract_all(const GrayImage& img, const Roi& roi, const ReferenceModels* ref,
                          const ExtractorConfig& cfg);

// ---------- building blocks shared with the tests ----------

struct CoocMetrics {
  double correlation = 0, energy = 0, entropy = 0, homogeneity = 1, variance = 0;
};

/// Metrics of an already symmetrized, sum-1 co-occurrence matrix (n x n,
/// row-major). Correlation falls back to 0 when a marginal is degenerate.
CoocMetrics cooc_metrics(const std::vector<double>& p, int n);

/// Co-occurrence counts of quantized values over the given offsets,
/// symmetrized and normalized to sum 1.
std::vector<double> cooccurrence_matrix(const std::vector<int>& q, int w, int h, int levels,
                                        const std::vector<std::pair<int, int>>& offsets);

/// Divergence/curl norms of a 2-D vector field (components as grids),
/// normalized by the cell count.
struct FieldNorms {
  double div_l1 = 0, div_l2 = 0, curl_l1 = 0, curl_l2 = 0;
};
FieldNorms field_div_curl_norms(const Grid& fx, const Grid& fy);

/// Mean SSIM over two equal-size planes (Gaussian 11x11 window, sigma 1.5).
double ssim_mean(const Grid& a, const Grid& b, double intensity_range);

/// Gabor real-part kernel (mean-subtracted), theta in radians.
Grid gabor_kernel(double theta, double lambda, double sigma, double gamma, double psi);

}  // namespace ndc::features
