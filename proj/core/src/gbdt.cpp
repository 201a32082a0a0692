#include "kartel/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <random>

#include "kartel/errors.hpp"

namespace kartel {

void Hyperparams::validate() const {
  if (n_trees < 0) throw InvalidArgument("n_trees must be nonnegative");
  if (max_depth < 0) throw InvalidArgument("max_depth must be nonnegative");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (min_samples_leaf < 1) throw InvalidArgument("min_samples_leaf must be at least 1");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
}

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

std::vector<int> Tree::used_features() const {
  std::vector<int> out;
  for (const auto& n : nodes) {
    if (!n.is_leaf()) out.push_back(n.feature);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double sigmoid(double margin) {
  if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

double GbdtModel::predict_margin(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_features) {
    throw DimensionMismatch(fmt::format("model expects {} features, got {}", n_features, x.size()));
  }
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(x);
  return base_score + learning_rate * sum;
}

double GbdtModel::predict_proba(std::span<const double> x) const { return sigmoid(predict_margin(x)); }

GradHess logistic_loss_grad_hess(int y, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument(fmt::format("probability {} outside (0, 1)", p));
  return {p - static_cast<double>(y), p * (1.0 - p)};
}

double logistic_loss(const GbdtModel& model, const FeatureMatrix& X, std::span<const int> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    // log(1 + exp(-m)) for y = 1, log(1 + exp(m)) for y = 0, computed stably.
    const double m = model.predict_margin(X.row(i));
    const double z = y[i] == 1 ? -m : m;
    total += z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  return X.rows() == 0 ? 0.0 : total / static_cast<double>(X.rows());
}

namespace {

void check_xy(const FeatureMatrix& X, std::span<const int> y) {
  if (X.rows() != y.size()) {
    throw DimensionMismatch(fmt::format("{} feature rows but {} labels", X.rows(), y.size()));
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw InvalidArgument(fmt::format("label {} is not 0/1", v));
  }
}

struct TreeBuilder {
  const FeatureMatrix& X;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  const Hyperparams& params;
  Tree tree;

  double leaf_value(double g, double h) const {
    const double denom = h + params.lambda;
    return denom > 0.0 ? -g / denom : 0.0;
  }

  double score(double g, double h) const {
    const double denom = h + params.lambda;
    return denom > 0.0 ? g * g / denom : 0.0;
  }

  int build(std::vector<std::size_t>& idx, int depth) {
    double g = 0.0;
    double h = 0.0;
    for (auto i : idx) {
      g += grad[i];
      h += hess[i];
    }
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{-1, 0.0, leaf_value(g, h), -1, -1});

    const auto n = idx.size();
    const auto min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
    if (depth >= params.max_depth || n < 2 * min_leaf) return node_id;

    const double parent = score(g, h);
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < X.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
      double gl = 0.0;
      double hl = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        gl += grad[order[k]];
        hl += hess[order[k]];
        const double lo = X(order[k], f);
        const double hi = X(order[k + 1], f);
        if (!(lo < hi)) continue;
        if (k + 1 < min_leaf || n - (k + 1) < min_leaf) continue;
        const double gain = 0.5 * (score(gl, hl) + score(g - gl, h - hl) - parent);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          double t = 0.5 * (lo + hi);
          if (!(t > lo)) t = hi;
          best_threshold = t;
        }
      }
    }
    if (best_feature < 0) return node_id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto i : idx) {
      (X(i, static_cast<std::size_t>(best_feature)) < best_threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }
};

}  // namespace

GbdtModel fit(const FeatureMatrix& X, std::span<const int> y, const Hyperparams& params) {
  params.validate();
  check_xy(X, y);
  const auto positives = std::count(y.begin(), y.end(), 1);
  const auto negatives = static_cast<std::ptrdiff_t>(y.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw DegenerateData("training data must contain both classes");
  }

  GbdtModel model;
  model.n_features = static_cast<int>(X.cols());
  model.base_score = std::log(static_cast<double>(positives) / static_cast<double>(negatives));
  model.learning_rate = params.learning_rate;
  model.hyperparams = params;

  const std::size_t n = X.rows();
  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - static_cast<double>(y[i]);
      hess[i] = p * (1.0 - p);
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    TreeBuilder builder{X, grad, hess, params, {}};
    builder.build(idx, 0);
    for (std::size_t i = 0; i < n; ++i) margin[i] += params.learning_rate * builder.tree.predict(X.row(i));
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

EvalReport EvalReport::from_counts(int hh, int hc, int ch, int cc) {
  const int n = hh + hc + ch + cc;
  if (n <= 0) throw InvalidArgument("cannot build a report from an empty set");
  const double d = static_cast<double>(n);
  EvalReport r = from_fractions(hh / d, hc / d, ch / d, cc / d);
  r.accuracy = static_cast<double>(hh + cc) / d;
  r.n = n;
  return r;
}

EvalReport EvalReport::from_fractions(double hh, double hc, double ch, double cc) {
  EvalReport r;
  r.honest_honest = hh;
  r.honest_cartel = hc;
  r.cartel_honest = ch;
  r.cartel_cartel = cc;
  r.accuracy = hh + cc;
  return r;
}

EvalReport evaluate(const GbdtModel& model, const FeatureMatrix& X, std::span<const int> y) {
  check_xy(X, y);
  int counts[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < X.rows(); ++i) ++counts[y[i]][model.predict_class(X.row(i))];
  return EvalReport::from_counts(counts[0][0], counts[0][1], counts[1][0], counts[1][1]);
}

namespace {

std::array<std::vector<std::size_t>, 2> shuffled_by_class(std::span<const int> y, std::mt19937_64& rng) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[static_cast<std::size_t>(y[i])].push_back(i);
  for (auto& c : by_class) std::shuffle(c.begin(), c.end(), rng);
  return by_class;
}

}  // namespace

SplitIndices stratified_split(std::span<const int> y, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw InvalidArgument(fmt::format("train fraction must lie in (0, 1), got {}", train_frac));
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw InvalidArgument(fmt::format("label {} is not 0/1", v));
  }
  std::mt19937_64 rng(seed);
  SplitIndices out;
  for (const auto& members : shuffled_by_class(y, rng)) {
    const auto n_train = static_cast<std::size_t>(std::lround(train_frac * static_cast<double>(members.size())));
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  if (out.train.empty() || out.test.empty()) {
    throw InvalidArgument(fmt::format("split {} leaves an empty train or test set", train_frac));
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> y, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("need at least two folds");
  for (int v : y) {
    if (v != 0 && v != 1) throw InvalidArgument(fmt::format("label {} is not 0/1", v));
  }
  std::mt19937_64 rng(seed);
  const auto by_class = shuffled_by_class(y, rng);
  for (std::size_t c = 0; c < 2; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw TooFewSamples(fmt::format("class {} has {} samples, fewer than {} folds", c, by_class[c].size(), k));
    }
  }
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t slot = 0;
  for (const auto& members : by_class) {
    for (auto i : members) folds[slot++ % folds.size()].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<Hyperparams> CvPlan::default_grid() {
  std::vector<Hyperparams> grid;
  for (int trees : {25, 50, 100}) {
    for (int depth : {2, 3}) {
      for (double lr : {0.1, 0.3}) {
        for (int leaf : {1, 2}) grid.push_back(Hyperparams{trees, depth, lr, leaf, 1.0});
      }
    }
  }
  return grid;
}

CvResult cross_validate(const FeatureMatrix& X, std::span<const int> y, const CvPlan& plan,
                        std::uint64_t seed) {
  check_xy(X, y);
  if (plan.grid.empty()) throw InvalidArgument("hyperparameter grid is empty");
  const auto folds = stratified_folds(y, plan.folds, seed);

  CvResult result;
  for (const auto& params : plan.grid) {
    CvCandidate cand{params, {}, 0.0};
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<std::size_t> train;
      for (std::size_t g = 0; g < folds.size(); ++g) {
        if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
      }
      std::sort(train.begin(), train.end());
      std::vector<int> y_train;
      for (auto i : train) y_train.push_back(y[i]);
      std::vector<int> y_val;
      for (auto i : folds[f]) y_val.push_back(y[i]);
      const auto model = fit(X.select_rows(train), y_train, params);
      cand.fold_scores.push_back(evaluate(model, X.select_rows(folds[f]), y_val).accuracy);
    }
    cand.mean_accuracy = std::accumulate(cand.fold_scores.begin(), cand.fold_scores.end(), 0.0) /
                         static_cast<double>(cand.fold_scores.size());
    result.candidates.push_back(std::move(cand));
  }

  const CvCandidate* best = &result.candidates.front();
  for (const auto& c : result.candidates) {
    const bool better =
        c.mean_accuracy > best->mean_accuracy ||
        (c.mean_accuracy == best->mean_accuracy &&
         (c.params.n_trees < best->params.n_trees ||
          (c.params.n_trees == best->params.n_trees && c.params.max_depth < best->params.max_depth)));
    if (better) best = &c;
  }
  result.best = best->params;
  result.best_mean_accuracy = best->mean_accuracy;
  return result;
}

TrainResult train_and_evaluate(const FeatureMatrix& X, std::span<const int> y, const CvPlan& plan,
                               std::uint64_t seed) {
  check_xy(X, y);
  std::mt19937_64 seeder(seed);
  const std::uint64_t split_seed = seeder();
  const std::uint64_t fold_seed = seeder();

  TrainResult r;
  r.split = stratified_split(y, plan.train_frac, split_seed);
  std::vector<int> y_train;
  for (auto i : r.split.train) y_train.push_back(y[i]);
  std::vector<int> y_test;
  for (auto i : r.split.test) y_test.push_back(y[i]);
  const auto X_train = X.select_rows(r.split.train);

  r.cv = cross_validate(X_train, y_train, plan, fold_seed);
  r.model = fit(X_train, y_train, r.cv.best);
  r.test_report = evaluate(r.model, X.select_rows(r.split.test), y_test);
  return r;
}

}  // namespace kartel
