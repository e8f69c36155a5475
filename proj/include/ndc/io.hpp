#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ndc/aggregate.hpp"
#include "ndc/features.hpp"
#include "ndc/selection.hpp"

namespace ndc::io {

/// 17 significant digits; round-trips every double.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// ---------- labels CSV (path,label) ----------

struct LabeledPath {
  std::string path;
  int label = 0;
};

std::vector<LabeledPath> read_labels_csv(const std::string& path);
void write_labels_csv(const std::string& path, const std::vector<LabeledPath>& entries);

// ---------- feature matrix CSV ----------

std::string feature_matrix_to_csv(const selection::FeatureMatrix& m);
selection::FeatureMatrix feature_matrix_from_csv(const std::string& content);

// ---------- reference models JSON ----------

nlohmann::json reference_to_json(const features::ReferenceModels& ref);
features::ReferenceModels reference_from_json(const nlohmann::json& j);

// ---------- selection report JSON ----------

nlohmann::json report_to_json(const selection::SelectionReport& report);
selection::SelectionReport report_from_json(const nlohmann::json& j);
std::string report_to_table(const selection::SelectionReport& report);

// ---------- models JSON ----------

nlohmann::json forest_to_json(const aggregate::RandomForest& forest);
aggregate::RandomForest forest_from_json(const nlohmann::json& j);

nlohmann::json scorer_to_json(const aggregate::WeightedScorer& scorer, const std::string& type);
aggregate::WeightedScorer scorer_from_json(const nlohmann::json& j);

nlohmann::json metrics_to_json(const aggregate::Metrics& m);

}  // namespace ndc::io
