#include "ndc/selection.hpp"

#include <algorithm>
#include <cmath>

#include "ndc/stats.hpp"

namespace ndc::selection {

std::vector<double> FeatureMatrix::column(std::size_t j) const {
  std::vector<double> v(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) v[i] = rows[i][j];
  return v;
}

std::vector<double> FeatureMatrix::column_of_class(std::size_t j, int label) const {
  std::vector<double> v;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (labels[i] == label) v.push_back(rows[i][j]);
  return v;
}

void FeatureMatrix::validate() const {
  if (rows.size() != labels.size()) throw Error("LengthMismatch", "rows vs labels");
  if (!paths.empty() && paths.size() != rows.size()) throw Error("LengthMismatch", "rows vs paths");
  for (const auto& r : rows) {
    if (r.size() != names.size()) throw Error("LengthMismatch", "row width vs names");
    for (double v : r)
      if (!std::isfinite(v)) throw Error("NonFiniteFeature", "matrix contains a non-finite value");
  }
  for (int l : labels)
    if (l != 0 && l != 1) throw Error("BadParameter", "labels must be 0 or 1");
}

const char* to_string(BStage s) {
  switch (s) {
    case BStage::kept: return "kept";
    case BStage::hampel_na: return "hampel-n/a";
    case BStage::low_variance: return "low-variance";
    case BStage::correlated: return "correlated";
    case BStage::ks_fail: return "ks-fail";
    case BStage::t_fail: return "t-fail";
    case BStage::bdist_fail: return "bdist-fail";
  }
  return "kept";
}

BStage b_stage_from_string(const std::string& s) {
  for (BStage st : {BStage::kept, BStage::hampel_na, BStage::low_variance, BStage::correlated,
                    BStage::ks_fail, BStage::t_fail, BStage::bdist_fail})
    if (s == to_string(st)) return st;
  throw Error("BadParameter", "unknown stage: " + s);
}

namespace {

struct Moments {
  double mean = 0, var = 0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= double(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= double(v.size());
  return m;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const Moments ma = moments(a), mb = moments(b);
  if (ma.var <= 0.0 || mb.var <= 0.0) return 0.0;
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - ma.mean) * (b[i] - mb.mean);
  cov /= double(a.size());
  return cov / std::sqrt(ma.var * mb.var);
}

}  // namespace

double fisher_score(const std::vector<double>& x_tp, const std::vector<double>& x_fp) {
  if (x_tp.size() < 2 || x_fp.size() < 2)
    throw Error("TooFewSamples", "fisher score needs >= 2 samples per class");
  const Moments mt = moments(x_tp), mf = moments(x_fp);
  const double denom = mt.var + mf.var;
  const double gap = mt.mean - mf.mean;
  if (denom <= 0.0) return gap == 0.0 ? 0.0 : 1e30;
  return gap * gap / denom;
}

void approach_a(const FeatureMatrix& m, const SelectionConfig& cfg, SelectionReport& report) {
  const std::size_t d = m.n_features();
  std::vector<std::pair<double, int>> ranked;  // (gap, index)
  for (std::size_t j = 0; j < d; ++j) {
    FeatureReport& fr = report.features[j];
    fr.a_evaluated = true;

    std::vector<double> tp = m.column_of_class(j, 1);
    std::vector<double> fp = m.column_of_class(j, 0);
    double lo = tp.empty() ? fp.front() : tp.front(), hi = lo;
    for (double v : tp) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (double v : fp) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = hi - lo;
    auto norm = [&](std::vector<double>& v) {
      for (double& x : v) x = span > 0.0 ? (x - lo) / span : 0.0;
    };
    norm(tp);
    norm(fp);

    const Moments mt = moments(tp), mf = moments(fp);
    fr.a_mu_tp = mt.mean;
    fr.a_mu_fp = mf.mean;
    fr.a_var_tp = mt.var;
    fr.a_var_fp = mf.var;
    const double gap = std::fabs(mt.mean - mf.mean);
    fr.a_kept = std::max(mt.var, mf.var) <= cfg.a_tau_var && gap >= cfg.a_delta_mean;
    if (fr.a_kept) ranked.emplace_back(gap, int(j));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (cfg.a_top_n > 0 && ranked.size() > std::size_t(cfg.a_top_n)) {
    for (std::size_t k = std::size_t(cfg.a_top_n); k < ranked.size(); ++k)
      report.features[std::size_t(ranked[k].second)].a_kept = false;
    ranked.resize(std::size_t(cfg.a_top_n));
  }
  report.a_kept.clear();
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    report.a_kept.push_back(ranked[k].second);
    report.features[std::size_t(ranked[k].second)].a_rank = int(k);
  }
  report.ran_a = true;
}

void approach_b(const FeatureMatrix& m, const SelectionConfig& cfg, SelectionReport& report) {
  const std::size_t d = m.n_features();
  const std::size_t n_tp = std::size_t(std::count(m.labels.begin(), m.labels.end(), 1));
  const std::size_t n_fp = m.rows.size() - n_tp;
  if (n_tp < 8 || n_fp < 8)
    throw Error("TooFewSamples", "approach B needs >= 8 observations per class");

  // Hampel per feature per class (observation order), then pooled z-score.
  std::vector<std::vector<double>> ztp(d), zfp(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> tp =
        stats::hampel_filter(m.column_of_class(j, 1), cfg.hampel_window, cfg.hampel_k);
    std::vector<double> fp =
        stats::hampel_filter(m.column_of_class(j, 0), cfg.hampel_window, cfg.hampel_k);
    std::vector<double> pooled;
    pooled.reserve(tp.size() + fp.size());
    pooled.insert(pooled.end(), tp.begin(), tp.end());
    pooled.insert(pooled.end(), fp.begin(), fp.end());
    const std::vector<double> z = zscore_normalize(pooled);
    ztp[j].assign(z.begin(), z.begin() + long(tp.size()));
    zfp[j].assign(z.begin() + long(tp.size()), z.end());
  }

  std::vector<BStage> stage(d, BStage::kept);

  // variance prune on the standardized data (constant features collapse to 0)
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> pooled = ztp[j];
    pooled.insert(pooled.end(), zfp[j].begin(), zfp[j].end());
    if (std::sqrt(moments(pooled).var) < cfg.b_eps_var) stage[j] = BStage::low_variance;
  }

  // correlation prune keeps the lower-index member of each offending pair
  for (std::size_t i = 0; i < d; ++i) {
    if (stage[i] != BStage::kept) continue;
    std::vector<double> pi = ztp[i];
    pi.insert(pi.end(), zfp[i].begin(), zfp[i].end());
    for (std::size_t j = i + 1; j < d; ++j) {
      if (stage[j] != BStage::kept) continue;
      std::vector<double> pj = ztp[j];
      pj.insert(pj.end(), zfp[j].begin(), zfp[j].end());
      if (std::fabs(pearson(pi, pj)) > cfg.b_eps_corr) stage[j] = BStage::correlated;
    }
  }

  for (std::size_t j = 0; j < d; ++j) {
    FeatureReport& fr = report.features[j];
    fr.b_evaluated = true;
    if (stage[j] != BStage::kept) {
      fr.b_stage = stage[j];
      continue;
    }

    const stats::KsResult ks_tp = stats::ks_normal_test(ztp[j]);
    const stats::KsResult ks_fp = stats::ks_normal_test(zfp[j]);
    fr.has_ks = true;
    fr.ks_d_tp = ks_tp.d;
    fr.ks_d_fp = ks_fp.d;
    fr.ks_p_tp = ks_tp.p_std;
    fr.ks_p_fp = ks_fp.p_std;
    fr.ks_p_paper_tp = ks_tp.p_paper;
    fr.ks_p_paper_fp = ks_fp.p_paper;
    if (!(ks_tp.p_std > cfg.b_alpha_ks && ks_fp.p_std > cfg.b_alpha_ks)) {
      fr.b_stage = BStage::ks_fail;
      continue;
    }

    const stats::WelchResult wt = stats::welch_t_test(ztp[j], zfp[j]);
    fr.has_t = true;
    fr.t_stat = wt.t;
    fr.t_p = wt.p_paper;
    if (!(wt.p_paper < cfg.b_alpha_t)) {
      fr.b_stage = BStage::t_fail;
      continue;
    }

    const Moments mt = moments(ztp[j]), mf = moments(zfp[j]);
    fr.has_bdist = true;
    fr.bdist = stats::gaussian_bhattacharyya_1d(mt.mean, mt.var, mf.mean, mf.var);
    if (fr.bdist < cfg.b_tau_b) {
      fr.b_stage = BStage::bdist_fail;
      continue;
    }
    fr.b_stage = BStage::kept;
  }

  report.b_kept.clear();
  for (std::size_t j = 0; j < d; ++j)
    if (report.features[j].b_evaluated && report.features[j].b_stage == BStage::kept)
      report.b_kept.push_back(int(j));

  // joint multivariate distance across the surviving set, diagnostics only
  report.has_joint_bdist = false;
  const std::size_t kd = report.b_kept.size();
  if (kd >= 1) {
    auto class_stats = [&](const std::vector<std::vector<double>>& cols, std::size_t n_obs,
                           std::vector<double>& mu, std::vector<double>& cov) {
      mu.assign(kd, 0.0);
      cov.assign(kd * kd, 0.0);
      for (std::size_t a = 0; a < kd; ++a) {
        const auto& col = cols[std::size_t(report.b_kept[a])];
        for (double v : col) mu[a] += v;
        mu[a] /= double(n_obs);
      }
      for (std::size_t a = 0; a < kd; ++a)
        for (std::size_t b = a; b < kd; ++b) {
          const auto& ca = cols[std::size_t(report.b_kept[a])];
          const auto& cb = cols[std::size_t(report.b_kept[b])];
          double acc = 0.0;
          for (std::size_t i = 0; i < n_obs; ++i) acc += (ca[i] - mu[a]) * (cb[i] - mu[b]);
          cov[a * kd + b] = cov[b * kd + a] = acc / double(n_obs);
        }
    };
    std::vector<double> mu1, cov1, mu2, cov2;
    class_stats(ztp, n_tp, mu1, cov1);
    class_stats(zfp, n_fp, mu2, cov2);
    try {
      report.b_joint_bdist = stats::gaussian_bhattacharyya(mu1, cov1, mu2, cov2, int(kd));
      report.has_joint_bdist = true;
    } catch (const Error&) {
      report.has_joint_bdist = false;
    }
  }
  report.ran_b = true;
}

SelectionReport run_selection(const FeatureMatrix& m, const SelectionConfig& cfg, bool run_a,
                              bool run_b) {
  m.validate();
  SelectionReport report;
  report.cfg = cfg;
  const std::size_t d = m.n_features();
  report.features.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    report.features[j].index = int(j);
    report.features[j].name = m.names[j];
  }
  report.n_tp = std::size_t(std::count(m.labels.begin(), m.labels.end(), 1));
  report.n_fp = m.rows.size() - report.n_tp;
  if (report.n_tp < 2 || report.n_fp < 2)
    throw Error("TooFewSamples", "selection needs >= 2 observations per class");

  for (std::size_t j = 0; j < d; ++j)
    report.features[j].fisher = fisher_score(m.column_of_class(j, 1), m.column_of_class(j, 0));

  if (run_a) approach_a(m, cfg, report);
  if (run_b) approach_b(m, cfg, report);
  return report;
}

double optimize_param_threshold(
    const std::vector<double>& grid,
    const std::function<double(double, const GrayImage&)>& feature_fn,
    const std::vector<GrayImage>& tp_images, const std::vector<GrayImage>& fp_images) {
  if (grid.empty()) throw Error("EmptyGrid", "parameter grid is empty");
  if (tp_images.empty() || fp_images.empty())
    throw Error("EmptyClass", "both classes need at least one image");

  double best_param = grid.front();
  double best_obj = -1.0;
  for (double param : grid) {
    std::vector<double> tp, fp;
    tp.reserve(tp_images.size());
    fp.reserve(fp_images.size());
    for (const GrayImage& img : tp_images) tp.push_back(feature_fn(param, img));
    for (const GrayImage& img : fp_images) fp.push_back(feature_fn(param, img));
    const stats::SummaryStats st = stats::summary_stats(tp);
    const stats::SummaryStats sf = stats::summary_stats(fp);
    const double obj = std::fabs(st.mean - sf.mean) + std::fabs(st.median - sf.median);
    if (obj > best_obj + 1e-15) {
      best_obj = obj;
      best_param = param;
    } else if (std::fabs(obj - best_obj) <= 1e-15 && param < best_param) {
      best_param = param;
    }
  }
  return best_param;
}

ThresholdDecision decision_threshold(const std::vector<double>& scores_tp,
                                     const std::vector<double>& scores_fp) {
  if (scores_tp.empty() || scores_fp.empty())
    throw Error("TooFewSamples", "need at least one score per class");

  std::vector<double> all = scores_tp;
  all.insert(all.end(), scores_fp.begin(), scores_fp.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> candidates;
  for (std::size_t i = 0; i + 1 < all.size(); ++i)
    candidates.push_back(0.5 * (all[i] + all[i + 1]));
  if (candidates.empty()) candidates.push_back(all.front());

  auto balanced = [&](double theta, bool tp_above) {
    long tp_hit = 0, fp_hit = 0;
    for (double s : scores_tp)
      if (tp_above ? s > theta : s < theta) ++tp_hit;
    for (double s : scores_fp)
      if (tp_above ? s <= theta : s >= theta) ++fp_hit;
    const double tpr = double(tp_hit) / double(scores_tp.size());
    const double tnr = double(fp_hit) / double(scores_fp.size());
    return 0.5 * (tpr + tnr);
  };

  ThresholdDecision best;
  best.theta = candidates.front();
  best.tp_above = true;
  best.balanced_accuracy = -1.0;
  for (double theta : candidates)
    for (bool above : {true, false}) {
      const double acc = balanced(theta, above);
      if (acc > best.balanced_accuracy + 1e-12) {
        best = {theta, above, acc};
      }
    }
  return best;
}

}  // namespace ndc::selection
