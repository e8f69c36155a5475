#include <algorithm>
#include <cmath>

#include "ndc/features.hpp"
#include "ndc/rng.hpp"

namespace ndc::features {

namespace {

constexpr int kRefBins = 256;

Histogram median_histogram(const std::vector<GrayImage>& images) {
  Histogram out;
  out.bins.assign(kRefBins, 0.0);
  std::vector<Histogram> hists;
  hists.reserve(images.size());
  for (const GrayImage& img : images) hists.push_back(histogram(img, kRefBins));
  out.lo = hists.front().lo;
  out.hi = hists.front().hi;

  std::vector<double> col(images.size());
  for (int b = 0; b < kRefBins; ++b) {
    for (std::size_t i = 0; i < hists.size(); ++i) col[i] = hists[i].bins[std::size_t(b)];
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    out.bins[std::size_t(b)] = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  return out;
}

std::vector<double> reconstitute(const Histogram& h) {
  std::vector<double> samples;
  for (std::size_t b = 0; b < h.bins.size(); ++b) {
    const long reps = std::lround(h.bins[b]);
    for (long r = 0; r < reps; ++r) samples.push_back(h.bin_center(b));
  }
  return samples;
}

void loss_moments(const std::vector<GrayImage>& images, const ExtractorConfig& cfg, double& mu,
                  double& var) {
  std::vector<double> counts;
  counts.reserve(images.size());
  for (const GrayImage& img : images)
    counts.push_back(double(lost_mask(img, cfg.lost_thresh).count()));
  mu = 0.0;
  for (double c : counts) mu += c;
  mu /= double(counts.size());
  var = 0.0;
  for (double c : counts) var += (c - mu) * (c - mu);
  var /= double(counts.size());
}

}  // namespace

ReferenceModels build_reference_models(const std::vector<GrayImage>& defect_images,
                                       const std::vector<GrayImage>& noise_images,
                                       const ExtractorConfig& cfg) {
  cfg.validate();
  if (defect_images.empty() || noise_images.empty())
    throw Error("EmptyClass", "both classes need at least one image");

  ReferenceModels ref;
  ref.tp_median_hist = median_histogram(defect_images);
  ref.fp_median_hist = median_histogram(noise_images);

  auto fit_class = [&](const Histogram& h, stats::FittedPdf& weibull, stats::FittedPdf& gumbel,
                       stats::FittedPdf& gmm) {
    const std::vector<double> samples = reconstitute(h);
    if (samples.size() < 8)
      throw Error("TooFewSamples", "median histogram reconstitutes below 8 samples");

    // Weibull lives in the +1 domain so zero intensities stay inside the support
    std::vector<double> shifted(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) shifted[i] = samples[i] + 1.0;
    weibull = stats::weibull_fit(shifted);
    weibull.shift = 1.0;

    gumbel = stats::gumbel_fit(samples);

    stats::EmConfig em;
    em.seed = derive_seed(cfg.seed, 301);
    gmm.family = stats::PdfFamily::gmm;
    gmm.gmm = stats::gmm_fit_em(samples, cfg.gmm_K, em).model;
  };
  fit_class(ref.tp_median_hist, ref.tp_weibull, ref.tp_gumbel, ref.tp_gmm);
  fit_class(ref.fp_median_hist, ref.fp_weibull, ref.fp_gumbel, ref.fp_gmm);

  loss_moments(defect_images, cfg, ref.loss_mu_defect, ref.loss_var_defect);
  loss_moments(noise_images, cfg, ref.loss_mu_noise, ref.loss_var_noise);

  ref.prior_noise = cfg.prior_noise;
  ref.prior_defect = 1.0 - cfg.prior_noise;
  return ref;
}

}  // namespace ndc::features
