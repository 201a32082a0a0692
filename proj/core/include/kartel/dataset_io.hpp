#pragma once

// File formats.
//
// auctions.csv   auction_id,start_price,bid_index,bidder_id,price,label
//                Money has at most two fractional digits and is parsed as
//                exact hundredths. label is honest, cartel or empty.
// features.csv   auction_id,f1,...,fL,label   (label 0, 1 or empty)
// model.json     {"format":"kartel-gbdt","version":1,...}
// report.json    {"format":"kartel-report","version":1,...}
// trajectory.csv auction_index,share_aggressive,share_passive,share_random
// summary.csv    bid_index,mean_abs_phi
// scatter.csv    auction_id,bid_index,phi,value

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kartel/auction.hpp"
#include "kartel/features.hpp"
#include "kartel/gbdt.hpp"
#include "kartel/shapley.hpp"
#include "kartel/simulation.hpp"

namespace kartel {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

struct IngestWarning {
  std::string auction_id;
  int bid_index = 0;
  double decrement_frac = 0.0;
  std::string message;
};

struct IngestResult {
  std::vector<BidSeries> series;  // sorted by auction_id
  std::vector<IngestWarning> warnings;
};

/// Groups rows by auction, orders bids by bid_index and checks them. Decrements
/// outside `bounds` only produce warnings. Throws ParseError on malformed rows,
/// gaps or duplicates in bid_index, or inconsistent per-auction fields, and
/// NonMonotonePrices when prices fail to strictly decrease.
IngestResult read_auctions(std::istream& in, const AuctionConfig& bounds = {});
IngestResult read_auctions(const std::filesystem::path& path, const AuctionConfig& bounds = {});

/// Prices are rounded to hundredths on output.
void write_auctions(std::ostream& out, std::span<const BidSeries> series);
void write_auctions(const std::filesystem::path& path, std::span<const BidSeries> series);

void write_features(std::ostream& out, std::span<const FeatureVector> vectors);
void write_features(const std::filesystem::path& path, std::span<const FeatureVector> vectors);
std::vector<FeatureVector> read_features(std::istream& in);
std::vector<FeatureVector> read_features(const std::filesystem::path& path);

nlohmann::json model_to_json(const GbdtModel& model);
/// Throws SchemaVersionMismatch on an unknown format or version, ParseError
/// on structurally invalid documents.
GbdtModel model_from_json(const nlohmann::json& doc);
void save_model(const std::filesystem::path& path, const GbdtModel& model);
GbdtModel load_model(const std::filesystem::path& path);

/// Two-by-two percentage table, true class by row.
std::string format_report(const EvalReport& report);

struct ReportContext {
  std::optional<std::uint64_t> seed;
  std::optional<CvResult> cv;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

nlohmann::json report_to_json(const EvalReport& report, const ReportContext& context = {});
void write_report(const std::filesystem::path& path, const EvalReport& report, const ReportContext& context = {});

void write_trajectory(std::ostream& out, const SimulationRun& run);
void write_trajectory(const std::filesystem::path& path, const SimulationRun& run);

nlohmann::json explanation_to_json(const ShapleyExplanation& explanation);
void write_summary(std::ostream& out, const GlobalSummary& summary);
void write_scatter(std::ostream& out, const GlobalSummary& summary);

}  // namespace kartel
