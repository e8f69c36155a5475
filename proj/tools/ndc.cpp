// Command-line driver: synthetic data generation, reference building, feature
// extraction, statistical selection, training, classification, evaluation.
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ndc/aggregate.hpp"
#include "ndc/features.hpp"
#include "ndc/io.hpp"
#include "ndc/rng.hpp"
#include "ndc/selection.hpp"
#include "ndc/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
  ndc::features::ExtractorConfig extractor;
  ndc::synth::SynthConfig synth;
  ndc::selection::SelectionConfig selection;
  ndc::aggregate::ForestConfig forest;
};

void reject_unknown(const json& j, const std::string& section,
                    const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key))
      throw ndc::Error("UnknownConfigKey", "unknown key '" + key + "' in config section '" +
                                               section + "'");
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  const json j = json::parse(ndc::io::read_text_file(path));
  reject_unknown(j, "<root>", {"extractor", "synth", "selection", "forest"});

  if (j.contains("extractor")) {
    const json& e = j.at("extractor");
    reject_unknown(e, "extractor",
                   {"lost_thresh", "loss_count_lambda", "patch_grid", "patch_min_black",
                    "iqr_a", "iqr_b", "local_var_window", "lambda_noise", "gmm_K",
                    "proximity_sims", "proximity_max_pairs", "conn_a_min", "tv_alpha",
                    "tv_beta", "gabor_lambda", "gabor_sigma", "gabor_gamma", "gabor_psi",
                    "hog_cell", "hog_bins", "cooc_levels", "clahe_clip", "clahe_tiles",
                    "prior_noise", "seed"});
    auto& x = cfg.extractor;
    get_if(e, "lost_thresh", x.lost_thresh);
    get_if(e, "loss_count_lambda", x.loss_count_lambda);
    get_if(e, "patch_grid", x.patch_grid);
    get_if(e, "patch_min_black", x.patch_min_black);
    get_if(e, "iqr_a", x.iqr_a);
    get_if(e, "iqr_b", x.iqr_b);
    get_if(e, "local_var_window", x.local_var_window);
    get_if(e, "lambda_noise", x.lambda_noise);
    get_if(e, "gmm_K", x.gmm_K);
    get_if(e, "proximity_sims", x.proximity_sims);
    get_if(e, "proximity_max_pairs", x.proximity_max_pairs);
    get_if(e, "conn_a_min", x.conn_a_min);
    get_if(e, "tv_alpha", x.tv_alpha);
    get_if(e, "tv_beta", x.tv_beta);
    get_if(e, "gabor_lambda", x.gabor_lambda);
    get_if(e, "gabor_sigma", x.gabor_sigma);
    get_if(e, "gabor_gamma", x.gabor_gamma);
    get_if(e, "gabor_psi", x.gabor_psi);
    get_if(e, "hog_cell", x.hog_cell);
    get_if(e, "hog_bins", x.hog_bins);
    get_if(e, "cooc_levels", x.cooc_levels);
    get_if(e, "clahe_clip", x.clahe_clip);
    get_if(e, "clahe_tiles", x.clahe_tiles);
    get_if(e, "prior_noise", x.prior_noise);
    get_if(e, "seed", x.seed);
  }
  if (j.contains("synth")) {
    const json& s = j.at("synth");
    reject_unknown(s, "synth",
                   {"width", "height", "noise_density", "defect_blob_count", "blob_radius_px",
                    "blob_fill", "background_level", "texture_sigma"});
    auto& x = cfg.synth;
    get_if(s, "width", x.width);
    get_if(s, "height", x.height);
    get_if(s, "noise_density", x.noise_density);
    get_if(s, "defect_blob_count", x.defect_blob_count);
    get_if(s, "blob_radius_px", x.blob_radius_px);
    get_if(s, "blob_fill", x.blob_fill);
    get_if(s, "background_level", x.background_level);
    get_if(s, "texture_sigma", x.texture_sigma);
  }
  if (j.contains("selection")) {
    const json& s = j.at("selection");
    reject_unknown(s, "selection",
                   {"a_tau_var", "a_delta_mean", "a_top_n", "b_eps_var", "b_eps_corr",
                    "b_alpha_ks", "b_alpha_t", "b_tau_b", "hampel_window", "hampel_k"});
    auto& x = cfg.selection;
    get_if(s, "a_tau_var", x.a_tau_var);
    get_if(s, "a_delta_mean", x.a_delta_mean);
    get_if(s, "a_top_n", x.a_top_n);
    get_if(s, "b_eps_var", x.b_eps_var);
    get_if(s, "b_eps_corr", x.b_eps_corr);
    get_if(s, "b_alpha_ks", x.b_alpha_ks);
    get_if(s, "b_alpha_t", x.b_alpha_t);
    get_if(s, "b_tau_b", x.b_tau_b);
    get_if(s, "hampel_window", x.hampel_window);
    get_if(s, "hampel_k", x.hampel_k);
  }
  if (j.contains("forest")) {
    const json& f = j.at("forest");
    reject_unknown(f, "forest",
                   {"n_trees", "max_depth", "min_leaf", "features_per_split"});
    auto& x = cfg.forest;
    get_if(f, "n_trees", x.n_trees);
    get_if(f, "max_depth", x.max_depth);
    get_if(f, "min_leaf", x.min_leaf);
    get_if(f, "features_per_split", x.features_per_split);
  }
  return cfg;
}

// labels-file paths resolve relative to the labels file's directory
std::vector<std::pair<std::string, int>> resolve_labels(const std::string& labels_path) {
  const auto entries = ndc::io::read_labels_csv(labels_path);
  const fs::path base = fs::path(labels_path).parent_path();
  std::vector<std::pair<std::string, int>> out;
  for (const auto& e : entries) {
    fs::path p(e.path);
    if (p.is_relative()) p = base / p;
    out.emplace_back(p.string(), e.label);
  }
  return out;
}

int cmd_synth(const std::string& out_dir, int n, const RunConfig& cfg, std::uint64_t seed) {
  if (n < 1) throw ndc::Error("BadParameter", "--n must be >= 1");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  ndc::synth::SynthConfig sc = cfg.synth;
  const auto dataset = ndc::synth::gen_dataset(n, sc, seed);

  std::vector<ndc::io::LabeledPath> labels;
  int noise_idx = 0, defect_idx = 0;
  double lost_noise = 0.0, lost_defect = 0.0;
  for (const auto& item : dataset) {
    char name[64];
    if (item.label == 0)
      std::snprintf(name, sizeof name, "noise_%04d.pgm", noise_idx++);
    else
      std::snprintf(name, sizeof name, "defect_%04d.pgm", defect_idx++);
    ndc::write_pgm_file(item.image, (fs::path(out_dir) / name).string());
    labels.push_back({name, item.label});
    const double lost = double(ndc::lost_mask(item.image).count());
    (item.label == 0 ? lost_noise : lost_defect) += lost;
  }
  ndc::io::write_labels_csv((fs::path(out_dir) / "labels.csv").string(), labels);
  std::printf("wrote %d images per class to %s (%dx%d)\n", n, out_dir.c_str(), sc.width,
              sc.height);
  std::printf("mean lost pixels: noise %.1f, defect %.1f\n", lost_noise / n, lost_defect / n);
  return 0;
}

int cmd_build_ref(const std::string& labels_path, const std::string& out_path,
                  const RunConfig& cfg) {
  std::vector<ndc::GrayImage> defect, noise;
  for (const auto& [path, label] : resolve_labels(labels_path))
    (label == 1 ? defect : noise).push_back(ndc::load_pgm_file(path));
  if (defect.empty() || noise.empty())
    throw ndc::Error("EmptyClass", "labels file must list both classes");
  const auto ref = ndc::features::build_reference_models(defect, noise, cfg.extractor);
  ndc::io::write_text_file(out_path, ndc::io::reference_to_json(ref).dump(2) + "\n");
  std::printf("reference models written to %s (%zu defect, %zu noise images)\n",
              out_path.c_str(), defect.size(), noise.size());
  return 0;
}

int cmd_extract(const std::string& labels_path, const std::string& ref_path,
                const std::string& out_path, const RunConfig& cfg, int jobs) {
  const auto entries = resolve_labels(labels_path);

  ndc::features::ReferenceModels ref;
  bool has_ref = false;
  if (!ref_path.empty()) {
    ref = ndc::io::reference_from_json(json::parse(ndc::io::read_text_file(ref_path)));
    has_ref = true;
  } else {
    std::fprintf(stderr, "warning: no reference models; likelihood features use sentinels\n");
  }

  ndc::selection::FeatureMatrix m;
  for (const auto& d : ndc::features::registry()) m.names.push_back(d.name);
  m.rows.resize(entries.size());
  m.labels.resize(entries.size());
  m.paths.resize(entries.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= entries.size() || failed.load()) break;
      try {
        const ndc::GrayImage img = ndc::load_pgm_file(entries[i].first);
        ndc::features::ExtractorConfig ec = cfg.extractor;
        ec.seed = ndc::derive_seed(cfg.extractor.seed, i);
        const ndc::Roi full{0, 0, img.width, img.height};
        const auto fv =
            ndc::features::extract_all(img, full, has_ref ? &ref : nullptr, ec);
        m.rows[i] = fv.values;
        m.labels[i] = entries[i].second;
        m.paths[i] = entries[i].first;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        error_message = e.what();
        failed.store(true);
        break;
      }
    }
  };
  const int n_jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 0; t < n_jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load()) throw ndc::Error("ExtractionFailed", error_message);

  ndc::io::write_text_file(out_path, ndc::io::feature_matrix_to_csv(m));
  std::printf("extracted %zu rows x %zu features to %s\n", m.rows.size(), m.names.size(),
              out_path.c_str());
  return 0;
}

int cmd_select(const std::string& features_path, const std::string& out_path,
               const std::string& approach, const RunConfig& cfg) {
  const auto m =
      ndc::io::feature_matrix_from_csv(ndc::io::read_text_file(features_path));
  const bool run_a = approach == "a" || approach == "both";
  const bool run_b = approach == "b" || approach == "both";
  const auto report = ndc::selection::run_selection(m, cfg.selection, run_a, run_b);
  ndc::io::write_text_file(out_path, ndc::io::report_to_json(report).dump(2) + "\n");
  std::fputs(ndc::io::report_to_table(report).c_str(), stdout);
  return 0;
}

std::vector<int> kept_from_report(const ndc::selection::SelectionReport& report) {
  if (report.ran_b && !report.b_kept.empty()) return report.b_kept;
  if (report.ran_a && !report.a_kept.empty()) return report.a_kept;
  throw ndc::Error("EmptyKeptSet", "selection report keeps no features");
}

int cmd_train(const std::string& features_path, const std::string& report_path,
              const std::string& out_path, const std::string& mode, const RunConfig& cfg,
              std::uint64_t seed) {
  const auto m =
      ndc::io::feature_matrix_from_csv(ndc::io::read_text_file(features_path));
  const auto report =
      ndc::io::report_from_json(json::parse(ndc::io::read_text_file(report_path)));
  const std::vector<int> kept = kept_from_report(report);

  std::vector<double> fisher(m.n_features(), 0.0);
  for (const auto& f : report.features)
    if (f.index >= 0 && std::size_t(f.index) < fisher.size())
      fisher[std::size_t(f.index)] = f.fisher;

  json out;
  if (mode == "rf") {
    std::vector<std::vector<double>> x(m.n_rows());
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
      x[i].reserve(kept.size());
      for (int c : kept) x[i].push_back(m.rows[i][std::size_t(c)]);
    }
    ndc::aggregate::ForestConfig fc = cfg.forest;
    fc.seed = seed;
    auto forest = ndc::aggregate::rf_train(x, m.labels, fc);
    forest.feature_indices = kept;  // back to registry columns
    out = ndc::io::forest_to_json(forest);
    std::printf("random forest: %d trees, oob accuracy %.4f\n", fc.n_trees,
                forest.oob_accuracy);
  } else if (mode == "weighted") {
    const auto scorer = ndc::aggregate::fit_weighted_scorer(m, kept, fisher);
    double wsum = 0.0;
    for (const auto& p : scorer.parts) wsum += p.weight;
    out = ndc::io::scorer_to_json(scorer, "weighted");
    std::printf("weighted scorer over %zu features, weights sum = %s\n", scorer.parts.size(),
                ndc::io::format_double(wsum).c_str());
  } else if (mode == "threshold") {
    int best = kept.front();
    for (int c : kept)
      if (fisher[std::size_t(c)] > fisher[std::size_t(best)]) best = c;
    auto scorer = ndc::aggregate::fit_weighted_scorer(m, {best}, fisher);
    scorer.parts.front().weight = 1.0;
    out = ndc::io::scorer_to_json(scorer, "threshold");
    std::printf("threshold model on '%s': theta %s, direction %s\n",
                scorer.parts.front().name.c_str(),
                ndc::io::format_double(scorer.parts.front().threshold).c_str(),
                scorer.parts.front().tp_above ? "above" : "below");
  } else {
    throw ndc::Error("BadParameter", "mode must be threshold, weighted or rf");
  }
  ndc::io::write_text_file(out_path, out.dump(2) + "\n");
  return 0;
}

struct Scored {
  std::vector<int> cls;
  std::vector<double> score;
};

Scored classify_matrix(const json& model, const ndc::selection::FeatureMatrix& m) {
  Scored out;
  const std::string type = model.at("type").get<std::string>();
  if (type == "rf") {
    const auto forest = ndc::io::forest_from_json(model);
    for (const auto& row : m.rows) {
      const auto p = ndc::aggregate::rf_predict(forest, row);
      out.cls.push_back(p.cls);
      out.score.push_back(p.score);
    }
  } else {
    const auto scorer = ndc::io::scorer_from_json(model);
    for (const auto& row : m.rows) {
      const double s = ndc::aggregate::weighted_score(scorer, row);
      out.score.push_back(s);
      out.cls.push_back(s >= 0.5 ? 1 : 0);
    }
  }
  return out;
}

void write_predictions(const std::string& path, const ndc::selection::FeatureMatrix& m,
                       const Scored& s) {
  std::string csv = "path,score,class\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    csv += (i < m.paths.size() ? m.paths[i] : "");
    csv += "," + ndc::io::format_double(s.score[i]) + "," + std::to_string(s.cls[i]) + "\n";
  }
  ndc::io::write_text_file(path, csv);
}

int cmd_classify(const std::string& model_path, const std::string& features_path,
                 const std::string& out_path) {
  const json model = json::parse(ndc::io::read_text_file(model_path));
  const auto m =
      ndc::io::feature_matrix_from_csv(ndc::io::read_text_file(features_path));
  const Scored s = classify_matrix(model, m);
  write_predictions(out_path, m, s);
  std::printf("classified %zu rows to %s\n", m.rows.size(), out_path.c_str());
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& features_path,
                 const std::string& out_path, const std::string& predictions_path) {
  const json model = json::parse(ndc::io::read_text_file(model_path));
  const auto m =
      ndc::io::feature_matrix_from_csv(ndc::io::read_text_file(features_path));
  const Scored s = classify_matrix(model, m);
  if (!predictions_path.empty()) write_predictions(predictions_path, m, s);
  const auto metrics = ndc::aggregate::evaluate(s.cls, s.score, m.labels);
  ndc::io::write_text_file(out_path, ndc::io::metrics_to_json(metrics).dump(2) + "\n");
  std::printf("accuracy %.4f  precision %.4f  recall %.4f  f1 %.4f  roc_auc %.4f\n",
              metrics.accuracy, metrics.precision, metrics.recall, metrics.f1,
              metrics.roc_auc);
  return 0;
}

int exit_code_for(const ndc::Error& e) {
  static const std::set<std::string> usage = {"BadParameter", "UnknownConfigKey",
                                              "BadBinCount", "EmptyGrid"};
  static const std::set<std::string> numeric = {
      "TooFewSamples",      "NonPositiveDefinite", "NonPositiveSamples", "AllZeroCounts",
      "NonFiniteFeature",   "SingleClassTraining", "RegistryMismatch",
      "IndexOutOfRegistry", "DimensionMismatch",   "NumericFailure"};
  if (usage.count(e.code())) return 2;
  if (numeric.count(e.code())) return 4;
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noise/defect ROI classifier"};
  app.require_subcommand(1);

  std::string config_path, labels_path, ref_path, out_path, features_path, report_path,
      model_path, predictions_path, approach = "both", mode = "rf", out_dir;
  std::uint64_t seed = 0;
  int n = 0;
  int jobs = int(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--n", n, "images per class")->required();
  synth->add_option("--config", config_path, "run config JSON");
  synth->add_option("--seed", seed, "master seed");

  auto* build_ref = app.add_subcommand("build-ref", "fit per-class reference models");
  build_ref->add_option("--labels", labels_path, "labels.csv")->required();
  build_ref->add_option("--out", out_path, "reference JSON")->required();
  build_ref->add_option("--config", config_path, "run config JSON");
  build_ref->add_option("--seed", seed, "master seed");

  auto* extract = app.add_subcommand("extract", "extract the feature matrix");
  extract->add_option("--labels", labels_path, "labels.csv")->required();
  extract->add_option("--ref", ref_path, "reference JSON");
  extract->add_option("--out", out_path, "feature CSV")->required();
  extract->add_option("--config", config_path, "run config JSON");
  extract->add_option("--seed", seed, "master seed");
  extract->add_option("--jobs", jobs, "worker threads");

  auto* select = app.add_subcommand("select", "run the feature-selection pipeline");
  select->add_option("--features", features_path, "feature CSV")->required();
  select->add_option("--out", out_path, "report JSON")->required();
  select->add_option("--approach", approach, "a, b or both")
      ->check(CLI::IsMember({"a", "b", "both"}));
  select->add_option("--config", config_path, "run config JSON");

  auto* train = app.add_subcommand("train", "train a classifier on kept features");
  train->add_option("--features", features_path, "feature CSV")->required();
  train->add_option("--report", report_path, "selection report JSON")->required();
  train->add_option("--out", out_path, "model JSON")->required();
  train->add_option("--mode", mode, "threshold, weighted or rf")
      ->check(CLI::IsMember({"threshold", "weighted", "rf"}));
  train->add_option("--config", config_path, "run config JSON");
  train->add_option("--seed", seed, "training seed");

  auto* classify = app.add_subcommand("classify", "score rows with a trained model");
  classify->add_option("--model", model_path, "model JSON")->required();
  classify->add_option("--features", features_path, "feature CSV")->required();
  classify->add_option("--out", out_path, "predictions CSV")->required();

  auto* evaluate = app.add_subcommand("evaluate", "metrics against labels");
  evaluate->add_option("--model", model_path, "model JSON")->required();
  evaluate->add_option("--features", features_path, "feature CSV")->required();
  evaluate->add_option("--out", out_path, "metrics JSON")->required();
  evaluate->add_option("--predictions-out", predictions_path, "predictions CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed != 0) cfg.extractor.seed = seed;

    if (synth->parsed()) return cmd_synth(out_dir, n, cfg, seed);
    if (build_ref->parsed()) return cmd_build_ref(labels_path, out_path, cfg);
    if (extract->parsed()) return cmd_extract(labels_path, ref_path, out_path, cfg, jobs);
    if (select->parsed()) return cmd_select(features_path, out_path, approach, cfg);
    if (train->parsed())
      return cmd_train(features_path, report_path, out_path, mode, cfg, seed);
    if (classify->parsed()) return cmd_classify(model_path, features_path, out_path);
    if (evaluate->parsed())
      return cmd_evaluate(model_path, features_path, out_path, predictions_path);
  } catch (const ndc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: MalformedJson: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 2;
}
