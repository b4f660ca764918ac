#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "outbreak/panel.hpp"

// From-scratch binary classifiers: CART with Gini splits, the ensembles
// built on it (random forest, bagging, discrete AdaBoost over stumps),
// Gaussian naive Bayes, SGD logistic regression, and hard-majority voting.
// Forests expose Mean Decrease Gini feature importance: the per-node
// weighted impurity decreases p(t) * delta_i summed where a feature
// splits, averaged over trees, normalized to sum 1.

namespace outbreak {

struct TreeNode {
  int feature = -1;  // split feature index; -1 marks a leaf
  double threshold = 0.0;
  double sample_fraction = 0.0;    // p(t): node weight over root weight
  double impurity_decrease = 0.0;  // delta_i of this node's split
  std::array<double, 2> class_weight{0.0, 0.0};
  int predicted = 0;
  std::unique_ptr<TreeNode> left, right;

  bool is_leaf() const { return feature < 0; }
};

using TreePtr = std::unique_ptr<TreeNode>;

TreePtr clone_tree(const TreeNode& node);

enum class ClassifierKind {
  cart,
  forest,
  bagging,
  adaboost,
  gnb,
  sgd_logistic,
  voting,
};

const char* classifier_name(ClassifierKind kind);
ClassifierKind classifier_from_name(const std::string& name);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::forest;

  // trees
  int max_depth = -1;  // -1 = unlimited; 0 grows a lone leaf
  int min_samples_split = 2;

  // forest / bagging
  int n_trees = 100;
  int max_features = 0;  // 0 = default policy: ceil(sqrt(d)) for forest,
                         // all features for cart/bagging
  bool bootstrap = true;

  // adaboost
  int rounds = 50;
  int stump_depth = 1;

  // sgd logistic
  double learning_rate = 0.1;
  int epochs = 30;
  double l2 = 1e-4;
  int batch_size = 32;

  // voting; empty means the default lineup {cart, gnb, sgd}
  std::vector<ClassifierSpec> members;

  const char* name() const { return classifier_name(kind); }
};

struct ForestModel {
  std::vector<TreePtr> trees;
  std::size_t n_features = 0;
  int max_features = 0;  // the resolved per-split feature budget
  bool bootstrap = true;
  std::vector<std::uint64_t> tree_seeds;
};

struct AdaBoostModel {
  std::vector<TreePtr> stumps;
  std::vector<double> alphas;
};

struct GnbModel {
  std::array<double, 2> prior{0.0, 0.0};  // class probability; 0 if absent
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> variance;  // smoothing already added
};

struct SgdModel {
  std::vector<double> weights;
  double bias = 0.0;
};

struct ClassifierModel;

struct VotingModel {
  std::vector<ClassifierModel> members;
};

// Tagged union over every model family; `kind` selects the live payload.
struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::cart;
  std::size_t n_features = 0;
  ClassifierSpec spec;

  TreePtr tree;
  ForestModel forest;
  AdaBoostModel boost;
  GnbModel gnb;
  SgdModel sgd;
  VotingModel voting;
};

// --- Fitting ----------------------------------------------------------------

TreePtr fit_cart(const LabeledDataset& train, const ClassifierSpec& spec);

ForestModel fit_forest(const LabeledDataset& train, const ClassifierSpec& spec,
                       std::uint64_t seed, int threads = 1);

// Bagging is the all-features bootstrap ensemble.
ForestModel fit_bagging(const LabeledDataset& train,
                        const ClassifierSpec& spec, std::uint64_t seed,
                        int threads = 1);

AdaBoostModel fit_adaboost(const LabeledDataset& train,
                           const ClassifierSpec& spec, std::uint64_t seed);

GnbModel fit_gnb(const LabeledDataset& train);

SgdModel fit_sgd_logistic(const LabeledDataset& train,
                          const ClassifierSpec& spec, std::uint64_t seed);

VotingModel fit_voting(const LabeledDataset& train, const ClassifierSpec& spec,
                       std::uint64_t seed, int threads = 1);

ClassifierModel fit_classifier(const LabeledDataset& train,
                               const ClassifierSpec& spec, std::uint64_t seed,
                               int threads = 1);

// --- Prediction --------------------------------------------------------------

int predict_tree(const TreeNode& root, std::span<const double> row);

std::vector<int> predict(const ClassifierModel& model, const Matrix& rows);

// --- Feature importance --------------------------------------------------------

using ImportanceVector = std::vector<double>;

// Mean Decrease Gini over the forest, normalized to sum 1 (all zero when
// no tree ever splits).
ImportanceVector gini_importance(const ForestModel& model,
                                 std::size_t feature_count);

// Importance for any tree-backed model (cart is a one-tree forest,
// adaboost averages over its stumps). Returns empty for gnb/sgd/voting.
ImportanceVector model_importance(const ClassifierModel& model);

}  // namespace outbreak
