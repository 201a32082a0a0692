#pragma once

// Exact Shapley attribution of a model's cartel probability over bid
// positions, by full coalition enumeration against an interventional
// (background-marginal) value function:
//
//   v(S) = mean_b f(x_S, b_{~S})
//   phi_i = sum_{S not containing i} |S|! (L-|S|-1)! / L! * (v(S+i) - v(S))

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kartel/features.hpp"
#include "kartel/gbdt.hpp"

namespace kartel {

inline constexpr int kMaxExactFeatures = 20;

using Predictor = std::function<double(std::span<const double>)>;
/// Bit i set means feature i takes its value from the explained point.
using Coalition = std::uint32_t;

Predictor proba_of(const GbdtModel& model);

/// Throws EmptyBackground, DimensionMismatch.
double coalition_value(const Predictor& f, std::span<const double> x, Coalition coalition,
                       const FeatureMatrix& background);
double coalition_value(const GbdtModel& model, std::span<const double> x, Coalition coalition,
                       const FeatureMatrix& background);

struct ShapleyExplanation {
  std::string auction_id;
  double base_value = 0.0;
  std::vector<double> phis;
  double predicted = 0.0;

  /// |base + sum(phi) - predicted|
  double efficiency_gap() const;
};

/// Throws TooManyFeatures above kMaxExactFeatures.
ShapleyExplanation exact_shapley(const Predictor& f, std::span<const double> x, const FeatureMatrix& background);
ShapleyExplanation exact_shapley(const GbdtModel& model, const FeatureVector& x, const FeatureMatrix& background);

struct WaterfallRow {
  std::optional<int> feature;  // nullopt on the base row
  double phi = 0.0;
  double cumulative = 0.0;
};

/// Base row first, then every nonzero contribution sorted by |phi| ascending
/// (ties by feature index), accumulating from base_value to predicted.
std::vector<WaterfallRow> waterfall(const ShapleyExplanation& explanation);

struct ScatterPoint {
  std::string auction_id;
  int feature = 0;
  double phi = 0.0;
  double value = 0.0;
};

struct GlobalSummary {
  std::vector<double> mean_abs_phi;
  std::vector<ScatterPoint> scatter;
  std::vector<ShapleyExplanation> explanations;
};

/// Throws DegenerateData on an empty dataset.
GlobalSummary global_summary(const GbdtModel& model, std::span<const FeatureVector> dataset,
                             const FeatureMatrix& background);

}  // namespace kartel
