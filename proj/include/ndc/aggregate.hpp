#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ndc/error.hpp"
#include "ndc/selection.hpp"

namespace ndc::aggregate {

// ---------- weighted scoring ----------

struct ScoreMap {
  int feature_index = 0;
  std::string name;
  double threshold = 0.0;
  bool tp_above = true;
  double slope = 1.0;
  double weight = 1.0;
};

struct WeightedScorer {
  std::vector<ScoreMap> parts;  // weights sum to 1
};

/// Logistic squash of the signed distance to the threshold, in [0,1].
double feature_score(const ScoreMap& m, double x);

/// S = sum w_i * S_i over the referenced features.
double weighted_score(const WeightedScorer& s, const std::vector<double>& features);

/// Thresholds from decision_threshold per kept feature; slopes put the nearer
/// class mean around 0.95/0.05; weights proportional to the Fisher scores.
WeightedScorer fit_weighted_scorer(const selection::FeatureMatrix& m,
                                   const std::vector<int>& kept,
                                   const std::vector<double>& fisher_scores);

// ---------- random forest ----------

struct TreeNode {
  int feature = -1;        // split feature (into the forest's feature list)
  double threshold = 0.0;  // go left when x <= threshold
  int left = -1;
  int right = -1;
  int leaf_class = -1;  // >= 0 marks a leaf
};

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 12;
  int min_leaf = 2;
  int features_per_split = 0;  // 0: ceil(sqrt(d))
  std::uint64_t seed = 0;
};

struct RandomForest {
  std::vector<std::vector<TreeNode>> trees;
  std::vector<int> feature_indices;  // registry columns the forest consumes
  ForestConfig cfg;
  double oob_accuracy = 0.0;
};

/// Gini-split trees on bootstrap samples; deterministic for a fixed seed.
/// Throws SingleClassTraining when only one label is present.
RandomForest rf_train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      const ForestConfig& cfg);

struct Prediction {
  int cls = 0;
  double score = 0.0;  // vote fraction; class 1 when score >= 0.5
};

Prediction rf_predict(const RandomForest& f, const std::vector<double>& x);

// ---------- evaluation ----------

struct ConfusionMatrix {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};

struct Metrics {
  ConfusionMatrix cm;
  double accuracy = 0, precision = 0, recall = 0, f1 = 0, roc_auc = 0.5;
};

/// Standard metrics; ROC-AUC by the rank statistic with tie averaging.
/// Single-class labels fall back to auc 0.5.
Metrics evaluate(const std::vector<int>& predictions, const std::vector<double>& scores,
                 const std::vector<int>& labels);

}  // namespace ndc::aggregate
