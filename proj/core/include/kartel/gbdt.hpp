#pragma once

// Gradient-boosted regression trees for binary classification with logistic
// loss, exact greedy split search, and the stratified split / k-fold grid
// search evaluation protocol.

#include <cstdint>
#include <span>
#include <vector>

#include "kartel/features.hpp"

namespace kartel {

struct Hyperparams {
  int n_trees = 50;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_leaf = 1;
  double lambda = 1.0;  // L2 penalty on leaf values

  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Flat tree node. `feature < 0` marks a leaf. Samples with
/// x[feature] < threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  int depth() const;
  /// Feature indices used by any split in this tree.
  std::vector<int> used_features() const;
};

struct GbdtModel {
  int n_features = 0;
  double base_score = 0.0;  // log-odds of the training prior
  double learning_rate = 0.1;
  Hyperparams hyperparams{};
  std::vector<Tree> trees;

  /// base_score + learning_rate * sum of tree outputs.
  double predict_margin(std::span<const double> x) const;
  /// Throws DimensionMismatch if x has the wrong length.
  double predict_proba(std::span<const double> x) const;
  int predict_class(std::span<const double> x) const { return predict_proba(x) > 0.5 ? 1 : 0; }
};

double sigmoid(double margin);

struct GradHess {
  double grad = 0.0;
  double hess = 0.0;
};

/// Derivatives of the logistic loss -[y ln p + (1-y) ln(1-p)] with respect to
/// the log-odds: g = p - y, h = p (1 - p).
GradHess logistic_loss_grad_hess(int y, double p);

/// Mean logistic loss of the model on (X, y).
double logistic_loss(const GbdtModel& model, const FeatureMatrix& X, std::span<const int> y);

/// Throws DegenerateData unless both classes are present, DimensionMismatch
/// if X and y disagree.
GbdtModel fit(const FeatureMatrix& X, std::span<const int> y, const Hyperparams& params);

struct EvalReport {
  // Fractions of the evaluated set, keyed true -> predicted.
  double honest_honest = 0.0;
  double honest_cartel = 0.0;
  double cartel_honest = 0.0;
  double cartel_cartel = 0.0;
  double accuracy = 0.0;
  int n = 0;  // 0 when built from fractions only

  static EvalReport from_counts(int hh, int hc, int ch, int cc);
  static EvalReport from_fractions(double hh, double hc, double ch, double cc);
};

EvalReport evaluate(const GbdtModel& model, const FeatureMatrix& X, std::span<const int> y);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class shuffle, round(train_frac * n_class) to train. Both index lists
/// come back sorted. Throws InvalidArgument if either side would be empty.
SplitIndices stratified_split(std::span<const int> y, double train_frac, std::uint64_t seed);

/// k stratified folds that partition [0, y.size()). Throws TooFewSamples if a
/// class has fewer than k members.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> y, int k, std::uint64_t seed);

struct CvPlan {
  double train_frac = 0.7;
  int folds = 5;
  std::vector<Hyperparams> grid;

  /// n_trees {25,50,100} x depth {2,3} x lr {0.1,0.3} x min_leaf {1,2}, lambda 1.
  static std::vector<Hyperparams> default_grid();
};

struct CvCandidate {
  Hyperparams params;
  std::vector<double> fold_scores;
  double mean_accuracy = 0.0;
};

struct CvResult {
  Hyperparams best;
  double best_mean_accuracy = 0.0;
  std::vector<CvCandidate> candidates;  // grid order
};

/// Grid search maximizing mean fold accuracy. Ties go to fewer trees, then
/// shallower depth, then earlier grid position.
CvResult cross_validate(const FeatureMatrix& X, std::span<const int> y, const CvPlan& plan,
                        std::uint64_t seed);

struct TrainResult {
  SplitIndices split;
  CvResult cv;
  GbdtModel model;  // refit on the full training split with cv.best
  EvalReport test_report;
};

/// Split, cross-validate on the training part, refit, evaluate on the test part.
TrainResult train_and_evaluate(const FeatureMatrix& X, std::span<const int> y, const CvPlan& plan,
                               std::uint64_t seed);

}  // namespace kartel
