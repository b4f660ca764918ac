#include "outbreak/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace outbreak {

namespace {

using nlohmann::json;

void check_format(const json& doc, const char* format) {
  if (!doc.is_object() || doc.value("format", "") != format) {
    throw std::runtime_error(std::string("expected a '") + format +
                             "' document");
  }
  if (doc.value("version", 0) != 1) {
    throw std::runtime_error(std::string("unsupported ") + format +
                             " version");
  }
}

json panel_to_json(const PanelTable& table) {
  json keys = json::array();
  for (const auto& k : table.row_keys) {
    keys.push_back({k.country_code, k.year});
  }
  // Missing cells serialize as null; the mask is implied.
  json values = json::array();
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (table.observed(r, c)) {
        values.push_back(table.values(r, c));
      } else {
        values.push_back(nullptr);
      }
    }
  }
  return {{"row_keys", std::move(keys)},
          {"feature_names", table.feature_names},
          {"values", std::move(values)}};
}

PanelTable panel_from_json(const json& j) {
  std::vector<RowKey> keys;
  for (const auto& k : j.at("row_keys")) {
    keys.push_back({k.at(0).get<std::string>(), k.at(1).get<int>()});
  }
  PanelTable table = PanelTable::make(
      std::move(keys), j.at("feature_names").get<std::vector<std::string>>());
  const auto& values = j.at("values");
  if (values.size() != table.rows() * table.cols()) {
    throw std::runtime_error("panel values array has the wrong length");
  }
  std::size_t i = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c, ++i) {
      if (values[i].is_null()) {
        table.set_missing(r, c);
      } else {
        table.values(r, c) = values[i].get<double>();
      }
    }
  }
  return table;
}

json tree_to_json(const TreeNode& node) {
  json j = {{"weight", {node.class_weight[0], node.class_weight[1]}},
            {"p", node.sample_fraction},
            {"predicted", node.predicted}};
  if (!node.is_leaf()) {
    j["feature"] = node.feature;
    j["threshold"] = node.threshold;
    j["delta_i"] = node.impurity_decrease;
    j["left"] = tree_to_json(*node.left);
    j["right"] = tree_to_json(*node.right);
  }
  return j;
}

TreePtr tree_from_json(const json& j) {
  auto node = std::make_unique<TreeNode>();
  node->class_weight = {j.at("weight").at(0).get<double>(),
                        j.at("weight").at(1).get<double>()};
  node->sample_fraction = j.at("p").get<double>();
  node->predicted = j.at("predicted").get<int>();
  if (j.contains("feature")) {
    node->feature = j.at("feature").get<int>();
    node->threshold = j.at("threshold").get<double>();
    node->impurity_decrease = j.at("delta_i").get<double>();
    node->left = tree_from_json(j.at("left"));
    node->right = tree_from_json(j.at("right"));
  }
  return node;
}

json spec_to_json(const ClassifierSpec& spec) {
  json j = {{"kind", classifier_name(spec.kind)},
            {"max_depth", spec.max_depth},
            {"min_samples_split", spec.min_samples_split},
            {"n_trees", spec.n_trees},
            {"max_features", spec.max_features},
            {"bootstrap", spec.bootstrap},
            {"rounds", spec.rounds},
            {"stump_depth", spec.stump_depth},
            {"learning_rate", spec.learning_rate},
            {"epochs", spec.epochs},
            {"l2", spec.l2},
            {"batch_size", spec.batch_size}};
  if (!spec.members.empty()) {
    json members = json::array();
    for (const auto& m : spec.members) members.push_back(spec_to_json(m));
    j["members"] = std::move(members);
  }
  return j;
}

ClassifierSpec spec_from_json(const json& j) {
  ClassifierSpec spec;
  spec.kind = classifier_from_name(j.at("kind").get<std::string>());
  spec.max_depth = j.value("max_depth", spec.max_depth);
  spec.min_samples_split = j.value("min_samples_split", spec.min_samples_split);
  spec.n_trees = j.value("n_trees", spec.n_trees);
  spec.max_features = j.value("max_features", spec.max_features);
  spec.bootstrap = j.value("bootstrap", spec.bootstrap);
  spec.rounds = j.value("rounds", spec.rounds);
  spec.stump_depth = j.value("stump_depth", spec.stump_depth);
  spec.learning_rate = j.value("learning_rate", spec.learning_rate);
  spec.epochs = j.value("epochs", spec.epochs);
  spec.l2 = j.value("l2", spec.l2);
  spec.batch_size = j.value("batch_size", spec.batch_size);
  if (j.contains("members")) {
    for (const auto& m : j.at("members")) {
      spec.members.push_back(spec_from_json(m));
    }
  }
  return spec;
}

json forest_to_json(const ForestModel& model) {
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(tree_to_json(*t));
  return {{"n_features", model.n_features},
          {"max_features", model.max_features},
          {"bootstrap", model.bootstrap},
          {"tree_seeds", model.tree_seeds},
          {"trees", std::move(trees)}};
}

ForestModel forest_from_json(const json& j) {
  ForestModel model;
  model.n_features = j.at("n_features").get<std::size_t>();
  model.max_features = j.at("max_features").get<int>();
  model.bootstrap = j.at("bootstrap").get<bool>();
  model.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
  for (const auto& t : j.at("trees")) model.trees.push_back(tree_from_json(t));
  return model;
}

json classifier_payload(const ClassifierModel& model);

ClassifierModel classifier_from_payload(const json& j);

json classifier_payload(const ClassifierModel& model) {
  json j = {{"kind", classifier_name(model.kind)},
            {"n_features", model.n_features},
            {"spec", spec_to_json(model.spec)}};
  switch (model.kind) {
    case ClassifierKind::cart:
      j["tree"] = tree_to_json(*model.tree);
      break;
    case ClassifierKind::forest:
    case ClassifierKind::bagging:
      j["forest"] = forest_to_json(model.forest);
      break;
    case ClassifierKind::adaboost: {
      json stumps = json::array();
      for (const auto& s : model.boost.stumps) {
        stumps.push_back(tree_to_json(*s));
      }
      j["stumps"] = std::move(stumps);
      j["alphas"] = model.boost.alphas;
      break;
    }
    case ClassifierKind::gnb:
      j["prior"] = {model.gnb.prior[0], model.gnb.prior[1]};
      j["mean"] = {model.gnb.mean[0], model.gnb.mean[1]};
      j["variance"] = {model.gnb.variance[0], model.gnb.variance[1]};
      break;
    case ClassifierKind::sgd_logistic:
      j["weights"] = model.sgd.weights;
      j["bias"] = model.sgd.bias;
      break;
    case ClassifierKind::voting: {
      json members = json::array();
      for (const auto& m : model.voting.members) {
        members.push_back(classifier_payload(m));
      }
      j["voting_members"] = std::move(members);
      break;
    }
  }
  return j;
}

ClassifierModel classifier_from_payload(const json& j) {
  ClassifierModel model;
  model.kind = classifier_from_name(j.at("kind").get<std::string>());
  model.n_features = j.at("n_features").get<std::size_t>();
  model.spec = spec_from_json(j.at("spec"));
  switch (model.kind) {
    case ClassifierKind::cart:
      model.tree = tree_from_json(j.at("tree"));
      break;
    case ClassifierKind::forest:
    case ClassifierKind::bagging:
      model.forest = forest_from_json(j.at("forest"));
      break;
    case ClassifierKind::adaboost:
      for (const auto& s : j.at("stumps")) {
        model.boost.stumps.push_back(tree_from_json(s));
      }
      model.boost.alphas = j.at("alphas").get<std::vector<double>>();
      break;
    case ClassifierKind::gnb:
      model.gnb.prior = {j.at("prior").at(0).get<double>(),
                         j.at("prior").at(1).get<double>()};
      model.gnb.mean = {j.at("mean").at(0).get<std::vector<double>>(),
                        j.at("mean").at(1).get<std::vector<double>>()};
      model.gnb.variance = {
          j.at("variance").at(0).get<std::vector<double>>(),
          j.at("variance").at(1).get<std::vector<double>>()};
      break;
    case ClassifierKind::sgd_logistic:
      model.sgd.weights = j.at("weights").get<std::vector<double>>();
      model.sgd.bias = j.at("bias").get<double>();
      break;
    case ClassifierKind::voting:
      for (const auto& m : j.at("voting_members")) {
        model.voting.members.push_back(classifier_from_payload(m));
      }
      break;
  }
  return model;
}

}  // namespace

std::string imputer_to_json(const ImputerModel& model) {
  json doc = {{"format", "outbreak.imputer"},
              {"version", 1},
              {"method", imputer_name(model.kind)}};
  switch (model.kind) {
    case ImputerKind::knn:
      doc["k"] = model.knn_spec.k;
      doc["metric"] = "euclidean";
      doc["train"] = panel_to_json(model.knn_train);
      break;
    case ImputerKind::msreg: {
      const auto& reg = model.regression;
      doc["feature_names"] = reg.feature_names;
      doc["column_means"] = reg.column_means;
      doc["fit_order"] = reg.fit_order;
      json cols = json::array();
      for (const auto& c : reg.columns) {
        cols.push_back({{"predictors", c.predictors},
                        {"coefficients", c.coefficients},
                        {"sigma", c.sigma},
                        {"ridged", c.ridged}});
      }
      doc["columns"] = std::move(cols);
      break;
    }
    case ImputerKind::random_draw:
      doc["feature_names"] = model.random.feature_names;
      doc["observed"] = model.random.observed;
      break;
  }
  return doc.dump(2) + "\n";
}

ImputerModel imputer_from_json(const std::string& text) {
  const json doc = json::parse(text);
  check_format(doc, "outbreak.imputer");
  ImputerModel model;
  model.kind = imputer_from_name(doc.at("method").get<std::string>());
  switch (model.kind) {
    case ImputerKind::knn:
      model.knn_spec.k = doc.at("k").get<int>();
      model.knn_train = panel_from_json(doc.at("train"));
      break;
    case ImputerKind::msreg: {
      auto& reg = model.regression;
      reg.feature_names =
          doc.at("feature_names").get<std::vector<std::string>>();
      reg.column_means = doc.at("column_means").get<std::vector<double>>();
      reg.fit_order = doc.at("fit_order").get<std::vector<std::size_t>>();
      for (const auto& c : doc.at("columns")) {
        ColumnRegression col;
        col.predictors = c.at("predictors").get<std::vector<std::size_t>>();
        col.coefficients = c.at("coefficients").get<std::vector<double>>();
        col.sigma = c.at("sigma").get<double>();
        col.ridged = c.value("ridged", false);
        reg.columns.push_back(std::move(col));
      }
      break;
    }
    case ImputerKind::random_draw:
      model.random.feature_names =
          doc.at("feature_names").get<std::vector<std::string>>();
      model.random.observed =
          doc.at("observed").get<std::vector<std::vector<double>>>();
      break;
  }
  return model;
}

std::string scaler_to_json(const ScalerParams& params) {
  json doc = {{"format", "outbreak.scaler"},
              {"version", 1},
              {"kind", scaler_name(params.kind)},
              {"quantile_range",
               {params.quantile_range.first, params.quantile_range.second}},
              {"feature_names", params.feature_names},
              {"center", params.center},
              {"scale", params.scale}};
  return doc.dump(2) + "\n";
}

ScalerParams scaler_from_json(const std::string& text) {
  const json doc = json::parse(text);
  check_format(doc, "outbreak.scaler");
  ScalerParams params;
  params.kind = scaler_from_name(doc.at("kind").get<std::string>());
  params.quantile_range = {doc.at("quantile_range").at(0).get<double>(),
                           doc.at("quantile_range").at(1).get<double>()};
  params.feature_names =
      doc.at("feature_names").get<std::vector<std::string>>();
  params.center = doc.at("center").get<std::vector<double>>();
  params.scale = doc.at("scale").get<std::vector<double>>();
  return params;
}

std::string classifier_to_json(const ClassifierModel& model) {
  json doc = classifier_payload(model);
  doc["format"] = "outbreak.classifier";
  doc["version"] = 1;
  return doc.dump() + "\n";
}

ClassifierModel classifier_from_json(const std::string& text) {
  const json doc = json::parse(text);
  check_format(doc, "outbreak.classifier");
  return classifier_from_payload(doc);
}

void save_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << text;
}

std::string load_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace outbreak
