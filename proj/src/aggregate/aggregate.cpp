#include "ndc/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ndc/rng.hpp"

namespace ndc::aggregate {

double feature_score(const ScoreMap& m, double x) {
  const double sign = m.tp_above ? 1.0 : -1.0;
  const double z = std::clamp(-m.slope * sign * (x - m.threshold), -700.0, 700.0);
  return 1.0 / (1.0 + std::exp(z));
}

double weighted_score(const WeightedScorer& s, const std::vector<double>& features) {
  double acc = 0.0;
  for (const ScoreMap& m : s.parts) {
    if (m.feature_index < 0 || std::size_t(m.feature_index) >= features.size())
      throw Error("IndexOutOfRegistry", "scorer references feature " +
                                            std::to_string(m.feature_index));
    acc += m.weight * feature_score(m, features[std::size_t(m.feature_index)]);
  }
  return acc;
}

WeightedScorer fit_weighted_scorer(const selection::FeatureMatrix& m,
                                   const std::vector<int>& kept,
                                   const std::vector<double>& fisher_scores) {
  if (kept.empty()) throw Error("EmptyKeptSet", "no features to fit a scorer on");
  WeightedScorer s;
  double weight_total = 0.0;
  for (int idx : kept) {
    const std::vector<double> tp = m.column_of_class(std::size_t(idx), 1);
    const std::vector<double> fp = m.column_of_class(std::size_t(idx), 0);
    const selection::ThresholdDecision dec = selection::decision_threshold(tp, fp);

    double mu_tp = 0.0, mu_fp = 0.0;
    for (double v : tp) mu_tp += v;
    for (double v : fp) mu_fp += v;
    mu_tp /= double(tp.size());
    mu_fp /= double(fp.size());
    const double reach =
        std::max(std::min(std::fabs(mu_tp - dec.theta), std::fabs(mu_fp - dec.theta)), 1e-9);

    ScoreMap part;
    part.feature_index = idx;
    part.name = m.names[std::size_t(idx)];
    part.threshold = dec.theta;
    part.tp_above = dec.tp_above;
    part.slope = std::log(19.0) / reach;  // nearer class mean maps near 0.95
    part.weight = std::max(fisher_scores[std::size_t(idx)], 0.0);
    weight_total += part.weight;
    s.parts.push_back(part);
  }
  if (weight_total <= 0.0) {
    for (ScoreMap& p : s.parts) p.weight = 1.0 / double(s.parts.size());
  } else {
    for (ScoreMap& p : s.parts) p.weight /= weight_total;
  }
  return s;
}

// ---------- random forest ----------

namespace {

struct TreeBuilder {
  const std::vector<std::vector<double>>& x;
  const std::vector<int>& y;
  const ForestConfig& cfg;
  int n_features;
  int mtry;
  std::mt19937_64& rng;
  std::vector<TreeNode> nodes;

  int majority(const std::vector<int>& idx) const {
    long ones = 0;
    for (int i : idx) ones += y[std::size_t(i)];
    const long zeros = long(idx.size()) - ones;
    return ones >= zeros ? 1 : 0;  // tie flags a defect
  }

  static double gini(long ones, long total) {
    if (total == 0) return 0.0;
    const double p1 = double(ones) / double(total);
    const double p0 = 1.0 - p1;
    return 1.0 - p0 * p0 - p1 * p1;
  }

  int build(std::vector<int>& idx, int depth) {
    const int node_id = int(nodes.size());
    nodes.emplace_back();

    long ones = 0;
    for (int i : idx) ones += y[std::size_t(i)];
    const bool pure = ones == 0 || ones == long(idx.size());
    if (pure || depth >= cfg.max_depth || long(idx.size()) < 2 * cfg.min_leaf) {
      nodes[std::size_t(node_id)].leaf_class = majority(idx);
      return node_id;
    }

    // feature subset for this node
    std::vector<int> feats(std::size_t(n_features), 0);
    for (int f = 0; f < n_features; ++f) feats[std::size_t(f)] = f;
    for (int k = 0; k < mtry; ++k) {
      std::uniform_int_distribution<int> pick(k, n_features - 1);
      std::swap(feats[std::size_t(k)], feats[std::size_t(pick(rng))]);
    }

    int best_feat = -1;
    double best_thr = 0.0, best_impurity = 1e300;
    std::vector<std::pair<double, int>> vals(idx.size());
    for (int k = 0; k < mtry; ++k) {
      const int f = feats[std::size_t(k)];
      for (std::size_t i = 0; i < idx.size(); ++i)
        vals[i] = {x[std::size_t(idx[i])][std::size_t(f)], y[std::size_t(idx[i])]};
      std::sort(vals.begin(), vals.end());

      long left_ones = 0;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left_ones += vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;
        const long nl = long(i) + 1, nr = long(vals.size()) - nl;
        if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
        const double imp = (double(nl) * gini(left_ones, nl) +
                            double(nr) * gini(ones - left_ones, nr)) /
                           double(vals.size());
        if (imp < best_impurity - 1e-15) {
          best_impurity = imp;
          best_feat = f;
          best_thr = 0.5 * (vals[i].first + vals[i + 1].first);
        }
      }
    }
    if (best_feat < 0) {
      nodes[std::size_t(node_id)].leaf_class = majority(idx);
      return node_id;
    }

    std::vector<int> left, right;
    for (int i : idx)
      (x[std::size_t(i)][std::size_t(best_feat)] <= best_thr ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    nodes[std::size_t(node_id)].feature = best_feat;
    nodes[std::size_t(node_id)].threshold = best_thr;
    nodes[std::size_t(node_id)].left = l;
    nodes[std::size_t(node_id)].right = r;
    return node_id;
  }
};

// node features index into `cols`, which maps to columns of x
int tree_predict(const std::vector<TreeNode>& tree, const std::vector<double>& x,
                 const std::vector<int>& cols) {
  int at = 0;
  while (tree[std::size_t(at)].leaf_class < 0) {
    const TreeNode& n = tree[std::size_t(at)];
    at = x[std::size_t(cols[std::size_t(n.feature)])] <= n.threshold ? n.left : n.right;
  }
  return tree[std::size_t(at)].leaf_class;
}

}  // namespace

RandomForest rf_train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      const ForestConfig& cfg) {
  if (x.empty() || x.size() != y.size()) throw Error("LengthMismatch", "rows vs labels");
  const long ones = std::count(y.begin(), y.end(), 1);
  if (ones == 0 || ones == long(y.size()))
    throw Error("SingleClassTraining", "training data holds a single class");

  const int d = int(x.front().size());
  RandomForest forest;
  forest.cfg = cfg;
  if (forest.cfg.features_per_split <= 0)
    forest.cfg.features_per_split = int(std::ceil(std::sqrt(double(d))));
  forest.cfg.features_per_split = std::min(forest.cfg.features_per_split, d);
  forest.feature_indices.resize(std::size_t(d));
  for (int f = 0; f < d; ++f) forest.feature_indices[std::size_t(f)] = f;

  const std::size_t n = x.size();
  std::vector<long> oob_votes_one(n, 0), oob_votes(n, 0);

  for (int t = 0; t < forest.cfg.n_trees; ++t) {
    std::mt19937_64 rng(derive_seed(cfg.seed, std::uint64_t(t)));
    std::vector<int> sample(n);
    std::vector<std::uint8_t> in_bag(n, 0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = pick(rng);
      sample[i] = int(j);
      in_bag[j] = 1;
    }

    TreeBuilder builder{x, y, forest.cfg, d, forest.cfg.features_per_split, rng, {}};
    builder.build(sample, 0);
    forest.trees.push_back(std::move(builder.nodes));

    for (std::size_t i = 0; i < n; ++i)
      if (!in_bag[i]) {
        oob_votes_one[i] += tree_predict(forest.trees.back(), x[i], forest.feature_indices);
        oob_votes[i] += 1;
      }
  }

  long correct = 0, counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (oob_votes[i] == 0) continue;
    const int pred = 2 * oob_votes_one[i] >= oob_votes[i] ? 1 : 0;
    correct += pred == y[i] ? 1 : 0;
    ++counted;
  }
  forest.oob_accuracy = counted > 0 ? double(correct) / double(counted) : 0.0;
  return forest;
}

Prediction rf_predict(const RandomForest& f, const std::vector<double>& x) {
  for (int c : f.feature_indices)
    if (c < 0 || std::size_t(c) >= x.size())
      throw Error("DimensionMismatch", "feature vector narrower than the forest expects");
  long ones = 0;
  for (const auto& tree : f.trees) ones += tree_predict(tree, x, f.feature_indices);
  Prediction p;
  p.score = double(ones) / double(f.trees.size());
  p.cls = p.score >= 0.5 ? 1 : 0;
  return p;
}

Metrics evaluate(const std::vector<int>& predictions, const std::vector<double>& scores,
                 const std::vector<int>& labels) {
  if (predictions.size() != labels.size() || scores.size() != labels.size())
    throw Error("LengthMismatch", "predictions, scores and labels must align");
  if (labels.empty()) throw Error("EmptyInput", "nothing to evaluate");

  Metrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1)
      predictions[i] == 1 ? ++m.cm.tp : ++m.cm.fn;
    else
      predictions[i] == 1 ? ++m.cm.fp : ++m.cm.tn;
  }
  const double total = double(labels.size());
  m.accuracy = double(m.cm.tp + m.cm.tn) / total;
  m.precision = m.cm.tp + m.cm.fp > 0 ? double(m.cm.tp) / double(m.cm.tp + m.cm.fp) : 0.0;
  m.recall = m.cm.tp + m.cm.fn > 0 ? double(m.cm.tp) / double(m.cm.tp + m.cm.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;

  // rank statistic with tie-averaged ranks
  const long n_pos = m.cm.tp + m.cm.fn;
  const long n_neg = m.cm.fp + m.cm.tn;
  if (n_pos == 0 || n_neg == 0) {
    m.roc_auc = 0.5;
    return m;
  }
  std::vector<std::pair<double, int>> ranked(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) ranked[i] = {scores[i], labels[i]};
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < ranked.size()) {
    std::size_t j = i;
    while (j + 1 < ranked.size() && ranked[j + 1].first == ranked[i].first) ++j;
    const double avg_rank = 0.5 * (double(i + 1) + double(j + 1));
    for (std::size_t k = i; k <= j; ++k)
      if (ranked[k].second == 1) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  m.roc_auc =
      (rank_sum_pos - double(n_pos) * (double(n_pos) + 1.0) / 2.0) / (double(n_pos) * double(n_neg));
  return m;
}

}  // namespace ndc::aggregate
