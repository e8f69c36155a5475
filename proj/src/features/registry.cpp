#include <cmath>
#include <unordered_map>

#include "ndc/features.hpp"

namespace ndc::features {

void ExtractorConfig::validate() const {
  if (patch_grid != 4 && patch_grid != 8) throw Error("BadParameter", "patch_grid must be 4 or 8");
  if (patch_min_black < 1) throw Error("BadParameter", "patch_min_black must be >= 1");
  if (local_var_window < 1 || local_var_window % 2 == 0)
    throw Error("BadParameter", "local_var_window must be odd positive");
  if (gmm_K < 1) throw Error("BadParameter", "gmm_K must be >= 1");
  if (proximity_sims < 1) throw Error("BadParameter", "proximity_sims must be >= 1");
  if (proximity_max_pairs < 1) throw Error("BadParameter", "proximity_max_pairs must be >= 1");
  if (conn_a_min < 1) throw Error("BadParameter", "conn_a_min must be >= 1");
  if (gabor_lambda <= 0 || gabor_sigma <= 0 || gabor_gamma <= 0)
    throw Error("BadParameter", "gabor parameters must be positive");
  if (hog_cell < 1 || hog_bins < 1) throw Error("BadParameter", "hog parameters must be >= 1");
  if (cooc_levels < 2) throw Error("BadParameter", "cooc_levels must be >= 2");
  if (clahe_clip <= 0 || clahe_tiles < 1) throw Error("BadParameter", "bad clahe parameters");
  if (prior_noise <= 0.0 || prior_noise >= 1.0)
    throw Error("BadParameter", "prior_noise must be inside (0,1)");
  if (loss_count_lambda < 0) throw Error("BadParameter", "loss_count_lambda must be >= 0");
}

namespace {

std::vector<FeatureDescriptor> make_registry() {
  std::vector<FeatureDescriptor> r;
  auto add = [&r](const char* category, std::initializer_list<const char*> names) {
    for (const char* n : names)
      r.push_back({int(r.size()), std::string(category) + "." + n, category});
  };
  add("pixel_loss", {"a0_ratio", "hard_class", "loglik_ratio"});
  add("uniformity", {"chi2_p", "mc_p", "fisher_p"});
  add("iqr", {"outlier_ratio", "noise_ratio", "defect_ratio"});
  add("gmm_posterior", {"post_noise", "post_defect"});
  add("proximity", {"euclid", "manhattan", "chebyshev", "uniform_p"});
  add("connectivity", {"r_isolated_4", "r_isolated_8", "components_ratio"});
  add("hist_likelihood", {"n_tp_frac", "s_tp_weibull", "s_fp_weibull", "s_tp_gumbel",
                          "s_fp_gumbel", "s_tp_gmm", "s_fp_gmm", "best_class"});
  add("centroid", {"cx", "cy", "spread"});
  add("tv", {"row", "col", "diag", "int_row", "int_col", "int_diag", "combined", "int_combined",
             "d_combined"});
  add("hist_distance", {"bhat_tp", "bhat_fp", "corr_tp", "corr_fp", "inter_tp", "inter_fp"});
  add("point_loss", {"spread"});
  add("ssim", {"max_neighbor"});
  add("basic_stats",
      {"dynamic_range", "mean", "mode", "median", "max", "variance", "cv", "crlf"});
  add("texture", {"entropy", "energy", "homogeneity", "contrast", "kurtosis"});
  add("gabor", {"energy", "variance"});
  add("homomorphic", {"entropy"});
  add("hog_field", {"orient_variance", "div_l1", "div_l2", "curl_l1", "curl_l2"});
  add("lbp", {"entropy"});
  for (const char* m : {"glcm", "ogcm", "glrm", "flcm", "hogc", "hgcm"})
    for (const char* met : {"correlation", "energy", "entropy", "homogeneity", "variance"})
      r.push_back({int(r.size()), std::string("cooccurrence.") + m + "." + met, "cooccurrence"});
  return r;
}

}  // namespace

const std::vector<FeatureDescriptor>& registry() {
  static const std::vector<FeatureDescriptor> r = make_registry();
  return r;
}

std::size_t registry_size() { return registry().size(); }

int registry_index(const std::string& name) {
  static const std::unordered_map<std::string, int> lookup = [] {
    std::unordered_map<std::string, int> m;
    for (const auto& d : registry()) m[d.name] = d.index;
    return m;
  }();
  const auto it = lookup.find(name);
  return it == lookup.end() ? -1 : it->second;
}

FeatureVector extract_all(const GrayImage& img, const Roi& roi, const ReferenceModels* ref,
                          const ExtractorConfig& cfg) {
  cfg.validate();
  const GrayImage view = crop(img, roi);

  FeatureVector out;
  out.values.reserve(registry_size());
  auto push = [&out](double v) { out.values.push_back(v); };

  const PixelLossFeatures pl = f_pixel_loss(view, ref, cfg);
  push(pl.a0_ratio);
  push(pl.hard_class);
  push(pl.loglik_ratio);

  const UniformityFeatures un = f_uniformity(view, cfg);
  push(un.chi2_p);
  push(un.mc_p);
  push(un.fisher_p);

  const IqrFeatures iq = f_iqr(view, cfg);
  push(iq.outlier_ratio);
  push(iq.noise_ratio);
  push(iq.defect_ratio);

  const GmmPosteriorFeatures gp = f_gmm_posterior(view, ref, cfg);
  push(gp.post_noise);
  push(gp.post_defect);

  const ProximityFeatures px = f_proximity(view, cfg);
  push(px.mean_d_euclid);
  push(px.mean_d_manhattan);
  push(px.mean_d_chebyshev);
  push(px.uniform_p);

  const ConnectivityFeatures cn = f_connectivity(view, cfg);
  push(cn.r_isolated_4);
  push(cn.r_isolated_8);
  push(cn.n_components_ratio);

  const HistLikelihoodFeatures hl = f_hist_likelihood(view, ref, cfg);
  push(hl.n_tp_frac);
  push(hl.s_tp_w);
  push(hl.s_fp_w);
  push(hl.s_tp_g);
  push(hl.s_fp_g);
  push(hl.s_tp_m);
  push(hl.s_fp_m);
  push(hl.best_class);

  const CentroidFeatures ce = f_centroid(view, cfg);
  push(ce.cx_norm);
  push(ce.cy_norm);
  push(ce.spread_norm);

  const TvFeatures tv = f_tv(view, cfg);
  push(tv.tv_row);
  push(tv.tv_col);
  push(tv.tv_diag);
  push(tv.int_row);
  push(tv.int_col);
  push(tv.int_diag);
  push(tv.tv_combined);
  push(tv.int_combined);
  push(tv.d_combined);

  const HistDistanceFeatures hd = f_hist_distance(view, ref);
  push(hd.bhat_tp);
  push(hd.bhat_fp);
  push(hd.corr_tp);
  push(hd.corr_fp);
  push(hd.inter_tp);
  push(hd.inter_fp);

  push(f_pointloss_spread(view, cfg));
  push(f_ssim_neighbors(img, roi));

  const BasicStatsFeatures bs = f_basic_stats(view);
  push(bs.dynamic_range);
  push(bs.mean);
  push(bs.mode);
  push(bs.median);
  push(bs.max);
  push(bs.variance);
  push(bs.cv);
  push(bs.crlf);

  const TextureFeatures tx = f_texture(view);
  push(tx.entropy);
  push(tx.energy);
  push(tx.homogeneity);
  push(tx.contrast);
  push(tx.kurtosis);

  const GaborFeatures gb = f_gabor(view, cfg);
  push(gb.energy);
  push(gb.variance);

  push(f_homomorphic(view));

  const HogFieldFeatures hf = f_hog_field(view, cfg);
  push(hf.orient_variance);
  push(hf.div_l1);
  push(hf.div_l2);
  push(hf.curl_l1);
  push(hf.curl_l2);

  push(f_lbp(view, cfg));

  for (double v : f_cooccurrence(view, cfg)) push(v);

  if (out.values.size() != registry_size())
    throw Error("RegistryMismatch", "extractor output does not match the registry");
  for (std::size_t i = 0; i < out.values.size(); ++i)
    if (!std::isfinite(out.values[i]))
      throw Error("NonFiniteFeature", registry()[i].name + " produced a non-finite value");
  return out;
}

}  // namespace ndc::features
