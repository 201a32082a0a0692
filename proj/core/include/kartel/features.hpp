#pragma once

// Fixed-length representation of a bid history: the first L normalized
// prices, padded with the last observed price when the history is shorter.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kartel/auction.hpp"

namespace kartel {

inline constexpr int kDefaultSeriesLength = 11;

enum class FeatureMode {
  Prices,      // post-bid price / start price
  Decrements,  // per-bid decrement / start price (ablation channel)
};

struct FeatureVector {
  std::string auction_id;
  std::vector<double> values;
  std::optional<Label> label;
};

/// Row-major dense matrix of feature values.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static FeatureMatrix from_vectors(std::span<const FeatureVector> vectors);
  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws EmptySeries when the series has no bids.
FeatureVector to_features(const BidSeries& series, int length = kDefaultSeriesLength,
                          FeatureMode mode = FeatureMode::Prices);

std::vector<FeatureVector> to_features(std::span<const BidSeries> series, int length = kDefaultSeriesLength,
                                       FeatureMode mode = FeatureMode::Prices);

/// Truncates or pads (with the last value) an already numeric sequence.
std::vector<double> fit_length(std::span<const double> values, int length);

/// 0 for honest, 1 for cartel. Throws DegenerateData if any label is missing.
std::vector<int> labels_of(std::span<const FeatureVector> vectors);

}  // namespace kartel
