#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ndc/error.hpp"
#include "ndc/imaging.hpp"

namespace ndc::selection {

/// Observations x features with binary labels (0 noise/FP, 1 defect/TP).
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::string> paths;  // optional, parallel to rows when present

  std::size_t n_features() const { return names.size(); }
  std::size_t n_rows() const { return rows.size(); }
  std::vector<double> column(std::size_t j) const;
  std::vector<double> column_of_class(std::size_t j, int label) const;
  void validate() const;
};

struct SelectionConfig {
  // approach A
  double a_tau_var = 0.05;
  double a_delta_mean = 0.2;
  int a_top_n = 0;  // 0 keeps every passing feature
  // approach B
  double b_eps_var = 1e-8;
  double b_eps_corr = 0.99;
  double b_alpha_ks = 0.05;
  double b_alpha_t = 0.05;
  double b_tau_b = 0.05;
  int hampel_window = 5;
  double hampel_k = 3.0;
};

enum class BStage {
  kept,
  hampel_na,
  low_variance,
  correlated,
  ks_fail,
  t_fail,
  bdist_fail,
};
const char* to_string(BStage s);
BStage b_stage_from_string(const std::string& s);

struct FeatureReport {
  int index = 0;
  std::string name;
  double fisher = 0.0;

  bool a_evaluated = false;
  bool a_kept = false;
  int a_rank = -1;  // rank among kept features, 0 best
  double a_mu_tp = 0, a_mu_fp = 0, a_var_tp = 0, a_var_fp = 0;

  bool b_evaluated = false;
  BStage b_stage = BStage::kept;
  // statistics are only filled up to the stage that eliminated the feature
  bool has_ks = false;
  double ks_d_tp = 0, ks_d_fp = 0, ks_p_tp = 0, ks_p_fp = 0;
  double ks_p_paper_tp = 0, ks_p_paper_fp = 0;
  bool has_t = false;
  double t_stat = 0, t_p = 0;
  bool has_bdist = false;
  double bdist = 0;
};

struct SelectionReport {
  std::size_t n_tp = 0, n_fp = 0;
  SelectionConfig cfg;
  bool ran_a = false, ran_b = false;
  std::vector<FeatureReport> features;          // one per registry feature
  std::vector<int> a_kept;                      // ordered by descending mean gap
  std::vector<int> b_kept;                      // index order
  bool has_joint_bdist = false;
  double b_joint_bdist = 0.0;                   // multivariate, over b_kept
};

/// (mu1-mu2)^2 / (var1+var2), population variances. Zero variances with equal
/// means give 0, with distinct means a 1e30 sentinel. Throws TooFewSamples.
double fisher_score(const std::vector<double>& x_tp, const std::vector<double>& x_fp);

/// Joint min-max normalization, then keep features with small per-class
/// variance and a wide mean gap.
void approach_a(const FeatureMatrix& m, const SelectionConfig& cfg, SelectionReport& report);

/// Hampel -> pooled z-score -> variance prune -> correlation prune -> K-S
/// normality (both classes) -> Welch t -> univariate Bhattacharyya gate.
void approach_b(const FeatureMatrix& m, const SelectionConfig& cfg, SelectionReport& report);

SelectionReport run_selection(const FeatureMatrix& m, const SelectionConfig& cfg, bool run_a,
                              bool run_b);

/// Grid argmax of |mean gap| + |median gap| of the induced feature; ties take
/// the smallest parameter. Throws EmptyGrid.
double optimize_param_threshold(
    const std::vector<double>& grid,
    const std::function<double(double, const GrayImage&)>& feature_fn,
    const std::vector<GrayImage>& tp_images, const std::vector<GrayImage>& fp_images);

struct ThresholdDecision {
  double theta = 0.0;
  bool tp_above = true;
  double balanced_accuracy = 0.5;
};

/// Midpoint threshold maximizing balanced accuracy; ties take the smaller
/// theta, then the "above" direction.
ThresholdDecision decision_threshold(const std::vector<double>& scores_tp,
                                     const std::vector<double>& scores_fp);

}  // namespace ndc::selection
