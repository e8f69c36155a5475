#include "ndc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ndc::io {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("MissingFile", "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("UnwritableDir", "cannot write " + path);
  f << content;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("MalformedCsv", "bad numeric field: '" + s + "'");
  }
}

}  // namespace

std::vector<LabeledPath> read_labels_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<LabeledPath> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_line(line, ',');
    if (first && fields.size() >= 2 && fields[0] == "path") {
      first = false;
      continue;  // header
    }
    first = false;
    if (fields.size() != 2) throw Error("MalformedCsv", "labels row needs 'path,label'");
    const int label = int(parse_double(fields[1]));
    if (label != 0 && label != 1) throw Error("MalformedCsv", "label must be 0 or 1");
    out.push_back({fields[0], label});
  }
  if (out.empty()) throw Error("MalformedCsv", "labels file has no rows");
  return out;
}

void write_labels_csv(const std::string& path, const std::vector<LabeledPath>& entries) {
  std::ostringstream out;
  out << "path,label\n";
  for (const auto& e : entries) out << e.path << "," << e.label << "\n";
  write_text_file(path, out.str());
}

std::string feature_matrix_to_csv(const selection::FeatureMatrix& m) {
  std::ostringstream out;
  out << "path";
  for (const auto& n : m.names) out << "," << n;
  out << ",label\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    out << (i < m.paths.size() ? m.paths[i] : "");
    for (double v : m.rows[i]) out << "," << format_double(v);
    out << "," << m.labels[i] << "\n";
  }
  return out.str();
}

selection::FeatureMatrix feature_matrix_from_csv(const std::string& content) {
  std::istringstream in(content);
  selection::FeatureMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw Error("MalformedCsv", "empty feature csv");
  const auto header = split_line(line, ',');
  if (header.size() < 3 || header.front() != "path" || header.back() != "label")
    throw Error("MalformedCsv", "feature csv header must be path,<features...>,label");
  m.names.assign(header.begin() + 1, header.end() - 1);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_line(line, ',');
    if (fields.size() != header.size())
      throw Error("MalformedCsv", "feature row width does not match the header");
    m.paths.push_back(fields.front());
    std::vector<double> row(m.names.size());
    for (std::size_t j = 0; j < m.names.size(); ++j) row[j] = parse_double(fields[j + 1]);
    m.rows.push_back(std::move(row));
    const int label = int(parse_double(fields.back()));
    if (label != 0 && label != 1) throw Error("MalformedCsv", "label must be 0 or 1");
    m.labels.push_back(label);
  }
  m.validate();
  return m;
}

// ---------- reference models ----------

namespace {

nlohmann::json pdf_to_json(const stats::FittedPdf& pdf) {
  nlohmann::json j;
  switch (pdf.family) {
    case stats::PdfFamily::weibull:
      j["family"] = "weibull";
      j["shape"] = pdf.p1;
      j["scale"] = pdf.p2;
      j["shift"] = pdf.shift;
      break;
    case stats::PdfFamily::gumbel:
      j["family"] = "gumbel";
      j["location"] = pdf.p1;
      j["scale"] = pdf.p2;
      break;
    case stats::PdfFamily::gmm:
      j["family"] = "gmm";
      j["weights"] = pdf.gmm.weights;
      j["means"] = pdf.gmm.means;
      j["variances"] = pdf.gmm.variances;
      break;
  }
  return j;
}

stats::FittedPdf pdf_from_json(const nlohmann::json& j) {
  stats::FittedPdf pdf;
  const std::string family = j.at("family").get<std::string>();
  if (family == "weibull") {
    pdf.family = stats::PdfFamily::weibull;
    pdf.p1 = j.at("shape").get<double>();
    pdf.p2 = j.at("scale").get<double>();
    pdf.shift = j.value("shift", 0.0);
  } else if (family == "gumbel") {
    pdf.family = stats::PdfFamily::gumbel;
    pdf.p1 = j.at("location").get<double>();
    pdf.p2 = j.at("scale").get<double>();
  } else if (family == "gmm") {
    pdf.family = stats::PdfFamily::gmm;
    pdf.gmm.weights = j.at("weights").get<std::vector<double>>();
    pdf.gmm.means = j.at("means").get<std::vector<double>>();
    pdf.gmm.variances = j.at("variances").get<std::vector<double>>();
    pdf.gmm.K = int(pdf.gmm.weights.size());
  } else {
    throw Error("MalformedJson", "unknown pdf family: " + family);
  }
  return pdf;
}

nlohmann::json hist_to_json(const Histogram& h) {
  return nlohmann::json{{"bins", h.bins}, {"lo", h.lo}, {"hi", h.hi}};
}

Histogram hist_from_json(const nlohmann::json& j) {
  Histogram h;
  h.bins = j.at("bins").get<std::vector<double>>();
  h.lo = j.at("lo").get<double>();
  h.hi = j.at("hi").get<double>();
  return h;
}

}  // namespace

nlohmann::json reference_to_json(const features::ReferenceModels& ref) {
  nlohmann::json j;
  j["tp"] = {{"median_hist", hist_to_json(ref.tp_median_hist)},
             {"weibull", pdf_to_json(ref.tp_weibull)},
             {"gumbel", pdf_to_json(ref.tp_gumbel)},
             {"gmm", pdf_to_json(ref.tp_gmm)}};
  j["fp"] = {{"median_hist", hist_to_json(ref.fp_median_hist)},
             {"weibull", pdf_to_json(ref.fp_weibull)},
             {"gumbel", pdf_to_json(ref.fp_gumbel)},
             {"gmm", pdf_to_json(ref.fp_gmm)}};
  j["loss_moments"] = {{"mu_defect", ref.loss_mu_defect},
                       {"var_defect", ref.loss_var_defect},
                       {"mu_noise", ref.loss_mu_noise},
                       {"var_noise", ref.loss_var_noise}};
  j["priors"] = {{"noise", ref.prior_noise}, {"defect", ref.prior_defect}};
  return j;
}

features::ReferenceModels reference_from_json(const nlohmann::json& j) {
  features::ReferenceModels ref;
  ref.tp_median_hist = hist_from_json(j.at("tp").at("median_hist"));
  ref.tp_weibull = pdf_from_json(j.at("tp").at("weibull"));
  ref.tp_gumbel = pdf_from_json(j.at("tp").at("gumbel"));
  ref.tp_gmm = pdf_from_json(j.at("tp").at("gmm"));
  ref.fp_median_hist = hist_from_json(j.at("fp").at("median_hist"));
  ref.fp_weibull = pdf_from_json(j.at("fp").at("weibull"));
  ref.fp_gumbel = pdf_from_json(j.at("fp").at("gumbel"));
  ref.fp_gmm = pdf_from_json(j.at("fp").at("gmm"));
  ref.loss_mu_defect = j.at("loss_moments").at("mu_defect").get<double>();
  ref.loss_var_defect = j.at("loss_moments").at("var_defect").get<double>();
  ref.loss_mu_noise = j.at("loss_moments").at("mu_noise").get<double>();
  ref.loss_var_noise = j.at("loss_moments").at("var_noise").get<double>();
  ref.prior_noise = j.at("priors").at("noise").get<double>();
  ref.prior_defect = j.at("priors").at("defect").get<double>();
  return ref;
}

// ---------- selection report ----------

nlohmann::json report_to_json(const selection::SelectionReport& report) {
  nlohmann::json j;
  j["registry_version"] = features::kRegistryVersion;
  j["n_tp"] = report.n_tp;
  j["n_fp"] = report.n_fp;
  if (report.ran_a) {
    j["approach_a"] = {{"tau_var", report.cfg.a_tau_var},
                       {"delta_mean", report.cfg.a_delta_mean},
                       {"kept", report.a_kept}};
  }
  if (report.ran_b) {
    nlohmann::json b = {{"eps_var", report.cfg.b_eps_var},
                        {"eps_corr", report.cfg.b_eps_corr},
                        {"alpha_ks", report.cfg.b_alpha_ks},
                        {"alpha_t", report.cfg.b_alpha_t},
                        {"tau_b", report.cfg.b_tau_b},
                        {"kept", report.b_kept}};
    b["joint_bhattacharyya"] =
        report.has_joint_bdist ? nlohmann::json(report.b_joint_bdist) : nlohmann::json();
    j["approach_b"] = b;
  }
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : report.features) {
    nlohmann::json e;
    e["index"] = f.index;
    e["name"] = f.name;
    e["fisher_score"] = f.fisher;
    if (f.a_evaluated) {
      e["a"] = {{"kept", f.a_kept}, {"mu_tp", f.a_mu_tp},   {"mu_fp", f.a_mu_fp},
                {"var_tp", f.a_var_tp}, {"var_fp", f.a_var_fp}, {"rank", f.a_rank}};
    }
    if (f.b_evaluated) {
      nlohmann::json b;
      b["stage"] = selection::to_string(f.b_stage);
      if (f.has_ks) {
        b["ks_d_tp"] = f.ks_d_tp;
        b["ks_d_fp"] = f.ks_d_fp;
        b["ks_p_tp"] = f.ks_p_tp;
        b["ks_p_fp"] = f.ks_p_fp;
        b["ks_p_paper_tp"] = f.ks_p_paper_tp;
        b["ks_p_paper_fp"] = f.ks_p_paper_fp;
      }
      if (f.has_t) {
        b["t"] = f.t_stat;
        b["t_p"] = f.t_p;
      }
      if (f.has_bdist) b["bdist"] = f.bdist;
      e["b"] = b;
    }
    feats.push_back(e);
  }
  j["features"] = feats;
  return j;
}

selection::SelectionReport report_from_json(const nlohmann::json& j) {
  selection::SelectionReport r;
  r.n_tp = j.at("n_tp").get<std::size_t>();
  r.n_fp = j.at("n_fp").get<std::size_t>();
  if (j.contains("approach_a")) {
    r.ran_a = true;
    r.a_kept = j.at("approach_a").at("kept").get<std::vector<int>>();
  }
  if (j.contains("approach_b")) {
    r.ran_b = true;
    r.b_kept = j.at("approach_b").at("kept").get<std::vector<int>>();
    const auto& joint = j.at("approach_b").at("joint_bhattacharyya");
    if (!joint.is_null()) {
      r.b_joint_bdist = joint.get<double>();
      r.has_joint_bdist = true;
    }
  }
  for (const auto& e : j.at("features")) {
    selection::FeatureReport f;
    f.index = e.at("index").get<int>();
    f.name = e.at("name").get<std::string>();
    f.fisher = e.at("fisher_score").get<double>();
    if (e.contains("a")) {
      f.a_evaluated = true;
      f.a_kept = e.at("a").at("kept").get<bool>();
      f.a_mu_tp = e.at("a").at("mu_tp").get<double>();
      f.a_mu_fp = e.at("a").at("mu_fp").get<double>();
      f.a_var_tp = e.at("a").at("var_tp").get<double>();
      f.a_var_fp = e.at("a").at("var_fp").get<double>();
      f.a_rank = e.at("a").at("rank").get<int>();
    }
    if (e.contains("b")) {
      f.b_evaluated = true;
      f.b_stage = selection::b_stage_from_string(e.at("b").at("stage").get<std::string>());
      if (e.at("b").contains("ks_d_tp")) {
        f.has_ks = true;
        f.ks_d_tp = e.at("b").at("ks_d_tp").get<double>();
        f.ks_d_fp = e.at("b").at("ks_d_fp").get<double>();
        f.ks_p_tp = e.at("b").at("ks_p_tp").get<double>();
        f.ks_p_fp = e.at("b").at("ks_p_fp").get<double>();
      }
      if (e.at("b").contains("t")) {
        f.has_t = true;
        f.t_stat = e.at("b").at("t").get<double>();
        f.t_p = e.at("b").at("t_p").get<double>();
      }
      if (e.at("b").contains("bdist")) {
        f.has_bdist = true;
        f.bdist = e.at("b").at("bdist").get<double>();
      }
    }
    r.features.push_back(f);
  }
  return r;
}

std::string report_to_table(const selection::SelectionReport& report) {
  std::ostringstream out;
  out << "index  name                                      fisher      A      B-stage\n";
  for (const auto& f : report.features) {
    char line[160];
    std::snprintf(line, sizeof line, "%-6d %-40s %-11.4g %-6s %s\n", f.index, f.name.c_str(),
                  f.fisher, f.a_evaluated ? (f.a_kept ? "keep" : "drop") : "-",
                  f.b_evaluated ? selection::to_string(f.b_stage) : "-");
    out << line;
  }
  out << "approach A kept: " << report.a_kept.size() << ", approach B kept: "
      << report.b_kept.size() << "\n";
  return out.str();
}

// ---------- models ----------

nlohmann::json forest_to_json(const aggregate::RandomForest& forest) {
  nlohmann::json j;
  j["type"] = "rf";
  j["feature_indices"] = forest.feature_indices;
  j["n_trees"] = forest.cfg.n_trees;
  j["max_depth"] = forest.cfg.max_depth;
  j["min_leaf"] = forest.cfg.min_leaf;
  j["features_per_split"] = forest.cfg.features_per_split;
  j["seed"] = forest.cfg.seed;
  j["oob_accuracy"] = forest.oob_accuracy;
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : forest.trees) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& n : tree)
      t.push_back({{"feature", n.feature},
                   {"threshold", n.threshold},
                   {"left", n.left},
                   {"right", n.right},
                   {"leaf_class", n.leaf_class}});
    trees.push_back(t);
  }
  j["trees"] = trees;
  return j;
}

aggregate::RandomForest forest_from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "rf") throw Error("MalformedJson", "not a forest model");
  aggregate::RandomForest f;
  f.feature_indices = j.at("feature_indices").get<std::vector<int>>();
  f.cfg.n_trees = j.at("n_trees").get<int>();
  f.cfg.max_depth = j.at("max_depth").get<int>();
  f.cfg.min_leaf = j.at("min_leaf").get<int>();
  f.cfg.features_per_split = j.at("features_per_split").get<int>();
  f.cfg.seed = j.at("seed").get<std::uint64_t>();
  f.oob_accuracy = j.at("oob_accuracy").get<double>();
  for (const auto& t : j.at("trees")) {
    std::vector<aggregate::TreeNode> tree;
    for (const auto& n : t) {
      aggregate::TreeNode node;
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
      node.leaf_class = n.at("leaf_class").get<int>();
      tree.push_back(node);
    }
    f.trees.push_back(std::move(tree));
  }
  return f;
}

nlohmann::json scorer_to_json(const aggregate::WeightedScorer& scorer, const std::string& type) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : scorer.parts)
    parts.push_back({{"feature_index", p.feature_index},
                     {"name", p.name},
                     {"threshold", p.threshold},
                     {"direction", p.tp_above ? "above" : "below"},
                     {"slope", p.slope},
                     {"weight", p.weight}});
  return nlohmann::json{{"type", type}, {"features", parts}};
}

aggregate::WeightedScorer scorer_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type != "weighted" && type != "threshold")
    throw Error("MalformedJson", "not a scorer model");
  aggregate::WeightedScorer s;
  for (const auto& p : j.at("features")) {
    aggregate::ScoreMap m;
    m.feature_index = p.at("feature_index").get<int>();
    m.name = p.at("name").get<std::string>();
    m.threshold = p.at("threshold").get<double>();
    m.tp_above = p.at("direction").get<std::string>() == "above";
    m.slope = p.at("slope").get<double>();
    m.weight = p.at("weight").get<double>();
    s.parts.push_back(m);
  }
  return s;
}

nlohmann::json metrics_to_json(const aggregate::Metrics& m) {
  return nlohmann::json{
      {"accuracy", m.accuracy},
      {"precision", m.precision},
      {"recall", m.recall},
      {"f1", m.f1},
      {"roc_auc", m.roc_auc},
      {"confusion",
       {{"tp", m.cm.tp}, {"fp", m.cm.fp}, {"tn", m.cm.tn}, {"fn", m.cm.fn}}}};
}

}  // namespace ndc::io
