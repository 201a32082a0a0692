#include "kartel/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fmt/format.h>

#include "kartel/errors.hpp"

namespace kartel {

Predictor proba_of(const GbdtModel& model) {
  return [&model](std::span<const double> x) { return model.predict_proba(x); };
}

namespace {

void check_point(std::span<const double> x, const FeatureMatrix& background) {
  if (background.empty()) throw EmptyBackground("background set is empty");
  if (background.cols() != x.size()) {
    throw DimensionMismatch(fmt::format("point has {} features, background has {}", x.size(), background.cols()));
  }
}

double value_unchecked(const Predictor& f, std::span<const double> x, Coalition coalition,
                       const FeatureMatrix& background, std::vector<double>& hybrid) {
  // Running mean: identical hybrids give bit-identical values, so a feature no
  // tree reads gets phi == 0 exactly and the full coalition equals f(x).
  const std::size_t n = x.size();
  double mean = 0.0;
  for (std::size_t r = 0; r < background.rows(); ++r) {
    const auto b = background.row(r);
    for (std::size_t i = 0; i < n; ++i) hybrid[i] = (coalition >> i) & 1U ? x[i] : b[i];
    mean += (f(hybrid) - mean) / static_cast<double>(r + 1);
  }
  return mean;
}

}  // namespace

double coalition_value(const Predictor& f, std::span<const double> x, Coalition coalition,
                       const FeatureMatrix& background) {
  check_point(x, background);
  std::vector<double> hybrid(x.size());
  return value_unchecked(f, x, coalition, background, hybrid);
}

double coalition_value(const GbdtModel& model, std::span<const double> x, Coalition coalition,
                       const FeatureMatrix& background) {
  return coalition_value(proba_of(model), x, coalition, background);
}

double ShapleyExplanation::efficiency_gap() const {
  double sum = base_value;
  for (double p : phis) sum += p;
  return std::abs(sum - predicted);
}

ShapleyExplanation exact_shapley(const Predictor& f, std::span<const double> x, const FeatureMatrix& background) {
  check_point(x, background);
  const std::size_t n = x.size();
  if (n > static_cast<std::size_t>(kMaxExactFeatures)) {
    throw TooManyFeatures(fmt::format("{} features exceed the exact-enumeration limit of {}", n, kMaxExactFeatures));
  }

  const std::size_t n_coalitions = std::size_t{1} << n;
  std::vector<double> v(n_coalitions);
  std::vector<double> hybrid(n);
  for (std::size_t s = 0; s < n_coalitions; ++s) {
    v[s] = value_unchecked(f, x, static_cast<Coalition>(s), background, hybrid);
  }

  // weight[k] = k! (n-k-1)! / n! = 1 / (n * C(n-1, k))
  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) {
    double binom = 1.0;
    for (std::size_t j = 1; j <= k; ++j) binom = binom * static_cast<double>(n - j) / static_cast<double>(j);
    weight[k] = 1.0 / (static_cast<double>(n) * binom);
  }

  ShapleyExplanation e;
  e.phis.assign(n, 0.0);
  for (std::size_t s = 0; s < n_coalitions; ++s) {
    const auto size = static_cast<std::size_t>(std::popcount(static_cast<Coalition>(s)));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      if (s & bit) continue;
      e.phis[i] += weight[size] * (v[s | bit] - v[s]);
    }
  }
  e.base_value = v.front();
  e.predicted = v.back();
  return e;
}

ShapleyExplanation exact_shapley(const GbdtModel& model, const FeatureVector& x, const FeatureMatrix& background) {
  auto e = exact_shapley(proba_of(model), x.values, background);
  e.auction_id = x.auction_id;
  return e;
}

std::vector<WaterfallRow> waterfall(const ShapleyExplanation& explanation) {
  std::vector<WaterfallRow> rows;
  rows.push_back({std::nullopt, 0.0, explanation.base_value});
  std::vector<int> order;
  for (std::size_t i = 0; i < explanation.phis.size(); ++i) {
    if (explanation.phis[i] != 0.0) order.push_back(static_cast<int>(i));
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(explanation.phis[static_cast<std::size_t>(a)]) <
           std::abs(explanation.phis[static_cast<std::size_t>(b)]);
  });
  double cumulative = explanation.base_value;
  for (int i : order) {
    const double phi = explanation.phis[static_cast<std::size_t>(i)];
    cumulative += phi;
    rows.push_back({i, phi, cumulative});
  }
  return rows;
}

GlobalSummary global_summary(const GbdtModel& model, std::span<const FeatureVector> dataset,
                             const FeatureMatrix& background) {
  if (dataset.empty()) throw DegenerateData("cannot summarize an empty dataset");
  GlobalSummary s;
  s.mean_abs_phi.assign(static_cast<std::size_t>(model.n_features), 0.0);
  for (const auto& point : dataset) {
    auto e = exact_shapley(model, point, background);
    for (std::size_t i = 0; i < e.phis.size(); ++i) {
      s.mean_abs_phi[i] += std::abs(e.phis[i]);
      s.scatter.push_back({point.auction_id, static_cast<int>(i), e.phis[i], point.values[i]});
    }
    s.explanations.push_back(std::move(e));
  }
  for (auto& m : s.mean_abs_phi) m /= static_cast<double>(dataset.size());
  return s;
}

}  // namespace kartel
