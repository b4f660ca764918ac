#include "outbreak/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "outbreak/parallel.hpp"
#include "outbreak/rng.hpp"

namespace outbreak {

namespace {

void require_trainable(const LabeledDataset& train, const char* who) {
  if (train.rows() == 0) {
    throw std::runtime_error(std::string(who) + ": empty training set");
  }
  if (!train.table.fully_observed()) {
    throw std::runtime_error(std::string(who) +
                             ": training data must be fully observed");
  }
}

void require_both_classes(const LabeledDataset& train, const char* who) {
  const bool has0 = std::find(train.labels.begin(), train.labels.end(), 0) !=
                    train.labels.end();
  const bool has1 = std::find(train.labels.begin(), train.labels.end(), 1) !=
                    train.labels.end();
  if (!has0 || !has1) {
    throw std::runtime_error(std::string(who) +
                             ": training data contains a single class");
  }
}

double gini(double w0, double w1) {
  const double total = w0 + w1;
  if (total <= 0.0) return 0.0;
  const double p0 = w0 / total;
  const double p1 = w1 / total;
  return 1.0 - p0 * p0 - p1 * p1;
}

// Grows one CART tree over the given row multiset. Weights are per-row in
// the original dataset (bootstrap multiplicity comes in through repeated
// row indices). feature_rng, when set, draws a fresh feature subset of
// size max_features at every split.
class CartBuilder {
 public:
  CartBuilder(const Matrix& x, const std::vector<int>& y,
              const std::vector<double>& weights, int max_depth,
              int min_samples_split, int max_features,
              rng::SplitMix64* feature_rng)
      : x_(x),
        y_(y),
        weights_(weights),
        max_depth_(max_depth),
        min_samples_split_(min_samples_split),
        max_features_(max_features),
        rng_(feature_rng),
        feature_pool_(x.n_cols) {
    std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
  }

  TreePtr build(const std::vector<std::size_t>& rows) {
    root_weight_ = 0.0;
    for (std::size_t r : rows) root_weight_ += weight(r);
    return grow(rows, 0);
  }

 private:
  double weight(std::size_t r) const {
    return weights_.empty() ? 1.0 : weights_[r];
  }

  TreePtr grow(const std::vector<std::size_t>& rows, int depth) {
    auto node = std::make_unique<TreeNode>();
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t r : rows) {
      (y_[r] == 0 ? w0 : w1) += weight(r);
    }
    node->class_weight = {w0, w1};
    node->sample_fraction = root_weight_ > 0 ? (w0 + w1) / root_weight_ : 0.0;
    node->predicted = w1 > w0 ? 1 : 0;

    const double node_impurity = gini(w0, w1);
    const bool depth_ok = max_depth_ < 0 || depth < max_depth_;
    if (!depth_ok || node_impurity <= 0.0 ||
        rows.size() < static_cast<std::size_t>(min_samples_split_)) {
      return node;
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_decrease = 0.0;
    const double wt = w0 + w1;

    for (int f : candidate_features()) {
      sorted_.clear();
      for (std::size_t r : rows) {
        sorted_.push_back({x_(r, f), y_[r], weight(r)});
      }
      std::sort(sorted_.begin(), sorted_.end(),
                [](const Entry& a, const Entry& b) { return a.x < b.x; });

      double l0 = 0.0, l1 = 0.0;
      for (std::size_t i = 0; i + 1 < sorted_.size(); ++i) {
        (sorted_[i].y == 0 ? l0 : l1) += sorted_[i].w;
        if (sorted_[i].x == sorted_[i + 1].x) continue;
        const double r0 = w0 - l0;
        const double r1 = w1 - l1;
        const double decrease = node_impurity -
                                ((l0 + l1) / wt) * gini(l0, l1) -
                                ((r0 + r1) / wt) * gini(r0, r1);
        if (decrease > best_decrease) {
          best_decrease = decrease;
          best_feature = f;
          best_threshold = sorted_[i].x + 0.5 * (sorted_[i + 1].x - sorted_[i].x);
        }
      }
    }

    if (best_feature < 0 || best_decrease <= 0.0) {
      return node;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      (x_(r, best_feature) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    }
    node->feature = best_feature;
    node->threshold = best_threshold;
    node->impurity_decrease = best_decrease;
    node->left = grow(left_rows, depth + 1);
    node->right = grow(right_rows, depth + 1);
    return node;
  }

  // Feature subset for this split, ascending so equal-gain ties resolve to
  // the lowest feature index.
  std::vector<int> candidate_features() {
    const int d = static_cast<int>(x_.n_cols);
    if (rng_ == nullptr || max_features_ >= d) {
      std::vector<int> all(d);
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    for (int i = 0; i < max_features_; ++i) {
      const auto j = i + static_cast<int>(rng::bounded(
                             *rng_, static_cast<std::uint64_t>(d - i)));
      std::swap(feature_pool_[i], feature_pool_[j]);
    }
    std::vector<int> subset(feature_pool_.begin(),
                            feature_pool_.begin() + max_features_);
    std::sort(subset.begin(), subset.end());
    return subset;
  }

  struct Entry {
    double x;
    int y;
    double w;
  };

  const Matrix& x_;
  const std::vector<int>& y_;
  const std::vector<double>& weights_;
  int max_depth_;
  int min_samples_split_;
  int max_features_;
  rng::SplitMix64* rng_;
  std::vector<int> feature_pool_;
  std::vector<Entry> sorted_;
  double root_weight_ = 0.0;
};

TreePtr grow_cart(const LabeledDataset& train, int max_depth,
                  int min_samples_split, int max_features,
                  const std::vector<double>& weights,
                  const std::vector<std::size_t>& rows,
                  rng::SplitMix64* feature_rng) {
  CartBuilder builder(train.table.values, train.labels, weights, max_depth,
                      min_samples_split, max_features, feature_rng);
  return builder.build(rows);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

int resolve_max_features(const ClassifierSpec& spec, std::size_t d) {
  if (spec.max_features > 0) {
    return std::min<int>(spec.max_features, static_cast<int>(d));
  }
  if (spec.kind == ClassifierKind::forest) {
    return static_cast<int>(std::ceil(std::sqrt(double(d))));
  }
  return static_cast<int>(d);
}

ForestModel fit_tree_ensemble(const LabeledDataset& train,
                              const ClassifierSpec& spec, std::uint64_t seed,
                              int threads, const char* who) {
  require_trainable(train, who);
  if (spec.n_trees < 1) {
    throw std::invalid_argument(std::string(who) + ": n_trees must be >= 1");
  }
  const std::size_t n = train.rows();
  const std::size_t d = train.table.cols();

  ForestModel model;
  model.n_features = d;
  model.max_features = resolve_max_features(spec, d);
  model.bootstrap = spec.bootstrap;
  model.trees.resize(spec.n_trees);
  model.tree_seeds.resize(spec.n_trees);
  for (int t = 0; t < spec.n_trees; ++t) {
    model.tree_seeds[t] = rng::derive(seed, static_cast<std::uint64_t>(t));
  }

  parallel_for(spec.n_trees, threads, [&](std::size_t t) {
    rng::SplitMix64 g(model.tree_seeds[t]);
    std::vector<std::size_t> rows;
    if (spec.bootstrap) {
      rows.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<std::size_t>(rng::bounded(g, n));
      }
    } else {
      rows = all_rows(n);
    }
    model.trees[t] =
        grow_cart(train, spec.max_depth, spec.min_samples_split,
                  model.max_features, {}, rows,
                  model.max_features < static_cast<int>(d) ? &g : nullptr);
  });
  return model;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

int vote_majority(int ones, int total) {
  return 2 * ones > total ? 1 : 0;  // tie -> class 0
}

ClassifierSpec default_voting_member(ClassifierKind kind,
                                     const ClassifierSpec& parent) {
  ClassifierSpec member = parent;
  member.kind = kind;
  member.members.clear();
  return member;
}

}  // namespace

TreePtr clone_tree(const TreeNode& node) {
  auto copy = std::make_unique<TreeNode>();
  copy->feature = node.feature;
  copy->threshold = node.threshold;
  copy->sample_fraction = node.sample_fraction;
  copy->impurity_decrease = node.impurity_decrease;
  copy->class_weight = node.class_weight;
  copy->predicted = node.predicted;
  if (node.left) copy->left = clone_tree(*node.left);
  if (node.right) copy->right = clone_tree(*node.right);
  return copy;
}

const char* classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::cart: return "cart";
    case ClassifierKind::forest: return "forest";
    case ClassifierKind::bagging: return "bagging";
    case ClassifierKind::adaboost: return "adaboost";
    case ClassifierKind::gnb: return "gnb";
    case ClassifierKind::sgd_logistic: return "sgd";
    case ClassifierKind::voting: return "voting";
  }
  return "?";
}

ClassifierKind classifier_from_name(const std::string& name) {
  if (name == "cart") return ClassifierKind::cart;
  if (name == "forest") return ClassifierKind::forest;
  if (name == "bagging") return ClassifierKind::bagging;
  if (name == "adaboost") return ClassifierKind::adaboost;
  if (name == "gnb") return ClassifierKind::gnb;
  if (name == "sgd") return ClassifierKind::sgd_logistic;
  if (name == "voting") return ClassifierKind::voting;
  throw std::invalid_argument("unknown classifier: " + name);
}

TreePtr fit_cart(const LabeledDataset& train, const ClassifierSpec& spec) {
  require_trainable(train, "fit_cart");
  return grow_cart(train, spec.max_depth, spec.min_samples_split,
                   static_cast<int>(train.table.cols()), {},
                   all_rows(train.rows()), nullptr);
}

ForestModel fit_forest(const LabeledDataset& train, const ClassifierSpec& spec,
                       std::uint64_t seed, int threads) {
  return fit_tree_ensemble(train, spec, seed, threads, "fit_forest");
}

ForestModel fit_bagging(const LabeledDataset& train,
                        const ClassifierSpec& spec, std::uint64_t seed,
                        int threads) {
  require_both_classes(train, "fit_bagging");
  return fit_tree_ensemble(train, spec, seed, threads, "fit_bagging");
}

AdaBoostModel fit_adaboost(const LabeledDataset& train,
                           const ClassifierSpec& spec, std::uint64_t seed) {
  (void)seed;  // deterministic: stumps are grown on weighted data, no draws
  require_trainable(train, "fit_adaboost");
  require_both_classes(train, "fit_adaboost");
  if (spec.rounds < 1) {
    throw std::invalid_argument("fit_adaboost: rounds must be >= 1");
  }

  const std::size_t n = train.rows();
  std::vector<double> w(n, 1.0 / double(n));
  AdaBoostModel model;
  model.stumps.reserve(spec.rounds);
  model.alphas.reserve(spec.rounds);
  const auto rows = all_rows(n);

  for (int m = 0; m < spec.rounds; ++m) {
    TreePtr stump = grow_cart(train, spec.stump_depth, 2,
                              static_cast<int>(train.table.cols()), w, rows,
                              nullptr);
    double err = 0.0;
    std::vector<std::uint8_t> wrong(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int pred = predict_tree(*stump, train.table.values.row(i));
      if (pred != train.labels[i]) {
        wrong[i] = 1;
        err += w[i];
      }
    }
    err = std::clamp(err, 1e-10, 1.0 - 1e-10);
    const double alpha = 0.5 * std::log((1.0 - err) / err);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(wrong[i] ? alpha : -alpha);
      total += w[i];
    }
    for (auto& wi : w) wi /= total;

    model.stumps.push_back(std::move(stump));
    model.alphas.push_back(alpha);
  }
  return model;
}

GnbModel fit_gnb(const LabeledDataset& train) {
  require_trainable(train, "fit_gnb");
  const std::size_t n = train.rows();
  const std::size_t d = train.table.cols();

  // Smoothing floor: 1e-9 times the largest whole-data feature variance.
  std::vector<double> overall_mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) overall_mean[c] += train.table.values(r, c);
  }
  for (auto& m : overall_mean) m /= double(n);
  double max_var = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dv = train.table.values(r, c) - overall_mean[c];
      var += dv * dv;
    }
    max_var = std::max(max_var, var / double(n));
  }
  const double smoothing = 1e-9 * max_var;

  GnbModel model;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < n; ++r) {
      if (train.labels[r] == cls) rows.push_back(r);
    }
    model.prior[cls] = double(rows.size()) / double(n);
    if (rows.empty()) continue;
    auto& mean = model.mean[cls];
    auto& var = model.variance[cls];
    mean.assign(d, 0.0);
    var.assign(d, 0.0);
    for (std::size_t r : rows) {
      for (std::size_t c = 0; c < d; ++c) mean[c] += train.table.values(r, c);
    }
    for (auto& m : mean) m /= double(rows.size());
    for (std::size_t r : rows) {
      for (std::size_t c = 0; c < d; ++c) {
        const double dv = train.table.values(r, c) - mean[c];
        var[c] += dv * dv;
      }
    }
    for (auto& v : var) v = v / double(rows.size()) + smoothing;
  }
  return model;
}

SgdModel fit_sgd_logistic(const LabeledDataset& train,
                          const ClassifierSpec& spec, std::uint64_t seed) {
  require_trainable(train, "fit_sgd_logistic");
  require_both_classes(train, "fit_sgd_logistic");
  if (spec.epochs < 1 || spec.batch_size < 1 || spec.learning_rate <= 0.0) {
    throw std::invalid_argument("fit_sgd_logistic: bad hyperparameters");
  }

  const std::size_t n = train.rows();
  const std::size_t d = train.table.cols();
  SgdModel model;
  model.weights.assign(d, 0.0);

  std::vector<std::size_t> order = all_rows(n);
  std::vector<double> grad(d);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    rng::SplitMix64 g(rng::derive(seed, static_cast<std::uint64_t>(epoch)));
    rng::shuffle(order, g);
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(spec.batch_size)) {
      const std::size_t end =
          std::min(n, start + static_cast<std::size_t>(spec.batch_size));
      const double inv = 1.0 / double(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_bias = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const auto row = train.table.values.row(order[i]);
        double z = model.bias;
        for (std::size_t c = 0; c < d; ++c) z += model.weights[c] * row[c];
        const double delta = sigmoid(z) - double(train.labels[order[i]]);
        for (std::size_t c = 0; c < d; ++c) grad[c] += delta * row[c];
        grad_bias += delta;
      }
      for (std::size_t c = 0; c < d; ++c) {
        model.weights[c] -=
            spec.learning_rate * (grad[c] * inv + spec.l2 * model.weights[c]);
      }
      model.bias -= spec.learning_rate * grad_bias * inv;
    }
  }
  return model;
}

VotingModel fit_voting(const LabeledDataset& train, const ClassifierSpec& spec,
                       std::uint64_t seed, int threads) {
  require_trainable(train, "fit_voting");
  require_both_classes(train, "fit_voting");
  std::vector<ClassifierSpec> members = spec.members;
  if (members.empty()) {
    members = {default_voting_member(ClassifierKind::cart, spec),
               default_voting_member(ClassifierKind::gnb, spec),
               default_voting_member(ClassifierKind::sgd_logistic, spec)};
  }
  VotingModel model;
  model.members.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    model.members.push_back(fit_classifier(
        train, members[i], rng::derive(seed, i), threads));
  }
  return model;
}

ClassifierModel fit_classifier(const LabeledDataset& train,
                               const ClassifierSpec& spec, std::uint64_t seed,
                               int threads) {
  ClassifierModel model;
  model.kind = spec.kind;
  model.spec = spec;
  model.n_features = train.table.cols();
  switch (spec.kind) {
    case ClassifierKind::cart:
      model.tree = fit_cart(train, spec);
      break;
    case ClassifierKind::forest:
      model.forest = fit_forest(train, spec, seed, threads);
      break;
    case ClassifierKind::bagging:
      model.forest = fit_bagging(train, spec, seed, threads);
      break;
    case ClassifierKind::adaboost:
      model.boost = fit_adaboost(train, spec, seed);
      break;
    case ClassifierKind::gnb:
      model.gnb = fit_gnb(train);
      break;
    case ClassifierKind::sgd_logistic:
      model.sgd = fit_sgd_logistic(train, spec, seed);
      break;
    case ClassifierKind::voting:
      model.voting = fit_voting(train, spec, seed, threads);
      break;
  }
  return model;
}

int predict_tree(const TreeNode& root, std::span<const double> row) {
  const TreeNode* node = &root;
  while (!node->is_leaf()) {
    node = (row[node->feature] <= node->threshold) ? node->left.get()
                                                   : node->right.get();
  }
  return node->predicted;
}

namespace {

int predict_one(const ClassifierModel& model, std::span<const double> row) {
  switch (model.kind) {
    case ClassifierKind::cart:
      return predict_tree(*model.tree, row);
    case ClassifierKind::forest:
    case ClassifierKind::bagging: {
      int ones = 0;
      for (const auto& tree : model.forest.trees) {
        ones += predict_tree(*tree, row);
      }
      return vote_majority(ones, static_cast<int>(model.forest.trees.size()));
    }
    case ClassifierKind::adaboost: {
      double score = 0.0;
      for (std::size_t m = 0; m < model.boost.stumps.size(); ++m) {
        const int h = predict_tree(*model.boost.stumps[m], row);
        score += model.boost.alphas[m] * (h == 1 ? 1.0 : -1.0);
      }
      return score > 0.0 ? 1 : 0;
    }
    case ClassifierKind::gnb: {
      double best = 0.0;
      int best_cls = 0;
      bool first = true;
      for (int cls = 0; cls < 2; ++cls) {
        if (model.gnb.prior[cls] <= 0.0) continue;
        double ll = std::log(model.gnb.prior[cls]);
        for (std::size_t c = 0; c < row.size(); ++c) {
          const double var = model.gnb.variance[cls][c];
          const double dv = row[c] - model.gnb.mean[cls][c];
          ll += -0.5 * std::log(2.0 * std::numbers::pi * var) -
                dv * dv / (2.0 * var);
        }
        if (first || ll > best) {
          best = ll;
          best_cls = cls;
          first = false;
        }
      }
      return best_cls;
    }
    case ClassifierKind::sgd_logistic: {
      double z = model.sgd.bias;
      for (std::size_t c = 0; c < row.size(); ++c) {
        z += model.sgd.weights[c] * row[c];
      }
      return z > 0.0 ? 1 : 0;
    }
    case ClassifierKind::voting: {
      int ones = 0;
      for (const auto& member : model.voting.members) {
        ones += predict_one(member, row);
      }
      return vote_majority(ones,
                           static_cast<int>(model.voting.members.size()));
    }
  }
  throw std::logic_error("predict: bad classifier kind");
}

}  // namespace

std::vector<int> predict(const ClassifierModel& model, const Matrix& rows) {
  if (rows.n_cols != model.n_features) {
    throw std::runtime_error(
        "predict: feature count mismatch (model expects " +
        std::to_string(model.n_features) + ", rows have " +
        std::to_string(rows.n_cols) + ")");
  }
  std::vector<int> out(rows.n_rows);
  for (std::size_t r = 0; r < rows.n_rows; ++r) {
    out[r] = predict_one(model, rows.row(r));
  }
  return out;
}

namespace {

void accumulate_importance(const TreeNode& node, std::vector<double>& imp) {
  if (node.is_leaf()) return;
  imp[node.feature] += node.sample_fraction * node.impurity_decrease;
  accumulate_importance(*node.left, imp);
  accumulate_importance(*node.right, imp);
}

ImportanceVector trees_importance(const std::vector<TreePtr>& trees,
                                  std::size_t feature_count) {
  std::vector<double> imp(feature_count, 0.0);
  for (const auto& tree : trees) {
    accumulate_importance(*tree, imp);
  }
  const double n_trees = double(trees.size());
  for (auto& v : imp) v /= n_trees;
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : imp) v /= total;
  }
  return imp;
}

}  // namespace

ImportanceVector gini_importance(const ForestModel& model,
                                 std::size_t feature_count) {
  if (feature_count < model.n_features) {
    throw std::invalid_argument(
        "gini_importance: feature_count smaller than the fitted model's");
  }
  return trees_importance(model.trees, feature_count);
}

ImportanceVector model_importance(const ClassifierModel& model) {
  switch (model.kind) {
    case ClassifierKind::cart: {
      std::vector<TreePtr> one;
      one.push_back(clone_tree(*model.tree));
      return trees_importance(one, model.n_features);
    }
    case ClassifierKind::forest:
    case ClassifierKind::bagging:
      return gini_importance(model.forest, model.n_features);
    case ClassifierKind::adaboost:
      return trees_importance(model.boost.stumps, model.n_features);
    default:
      return {};
  }
}

}  // namespace outbreak
