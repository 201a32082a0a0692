#include "kartel/features.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "kartel/errors.hpp"

namespace kartel {

FeatureMatrix FeatureMatrix::from_vectors(std::span<const FeatureVector> vectors) {
  if (vectors.empty()) return {};
  const std::size_t cols = vectors.front().values.size();
  FeatureMatrix m(vectors.size(), cols);
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    if (vectors[r].values.size() != cols) {
      throw DimensionMismatch(fmt::format("row '{}' has {} features, expected {}", vectors[r].auction_id,
                                          vectors[r].values.size(), cols));
    }
    std::copy(vectors[r].values.begin(), vectors[r].values.end(), m.row(r).begin());
  }
  return m;
}

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  FeatureMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw DimensionMismatch("ragged feature rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix m(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return m;
}

std::vector<double> fit_length(std::span<const double> values, int length) {
  if (length < 1) throw InvalidArgument(fmt::format("series length must be positive, got {}", length));
  if (values.empty()) throw EmptySeries("cannot pad an empty sequence");
  const auto L = static_cast<std::size_t>(length);
  std::vector<double> out(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(std::min(L, values.size())));
  out.resize(L, out.back());
  return out;
}

FeatureVector to_features(const BidSeries& series, int length, FeatureMode mode) {
  if (series.bids.empty()) {
    throw EmptySeries(fmt::format("auction '{}' has no bids", series.auction_id));
  }
  FeatureVector fv;
  fv.auction_id = series.auction_id;
  fv.label = series.label;
  if (mode == FeatureMode::Prices) {
    fv.values = fit_length(series.normalized_prices(), length);
  } else {
    // Padding a decrement channel repeats "no further movement", i.e. zero.
    if (length < 1) throw InvalidArgument(fmt::format("series length must be positive, got {}", length));
    auto dec = series.decrement_fractions();
    dec.resize(static_cast<std::size_t>(length), 0.0);
    fv.values = std::move(dec);
  }
  return fv;
}

std::vector<FeatureVector> to_features(std::span<const BidSeries> series, int length, FeatureMode mode) {
  std::vector<FeatureVector> out;
  out.reserve(series.size());
  for (const auto& s : series) out.push_back(to_features(s, length, mode));
  return out;
}

std::vector<int> labels_of(std::span<const FeatureVector> vectors) {
  std::vector<int> y;
  y.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (!v.label) throw DegenerateData(fmt::format("row '{}' has no label", v.auction_id));
    y.push_back(*v.label == Label::Cartel ? 1 : 0);
  }
  return y;
}

}  // namespace kartel
