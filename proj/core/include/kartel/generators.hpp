#pragma once

// Labeled synthetic bid histories.
//
// Honest series: bidders take turns shaving the minimal decrement (plus an
// optional jitter) until all but one have hit their escape point.
// Taran ("ram") series: one or two small cover bids, then ram bidders crash
// the price by a large fraction of the start price within a few bids,
// optionally followed by a closing cover bid. Ram drops deliberately exceed
// the legal 5% cap, as seen on real platform data.

#include <cstdint>
#include <vector>

#include "kartel/auction.hpp"

namespace kartel {

struct HonestGenConfig {
  AuctionConfig auction{};
  int n_bidders = 2;
  // Escape points are drawn uniformly on [cost_lo, cost_hi] * start_price.
  double cost_lo = 0.0;
  double cost_hi = 0.99;
  // Each decrement is min + U[0, jitter], as a fraction of start.
  double jitter = 0.0;

  void validate() const;
};

struct TaranGenConfig {
  AuctionConfig auction{};
  int n_ram_bidders = 2;
  int n_cover_bidders = 1;
  // Price after the ram phase is (1 - target_drop_frac) * start.
  double target_drop_frac = 0.81;
  int steps_to_target = 2;
  // Opening cover bids take decrements in [open_lo, open_hi].
  double open_lo = 0.005;
  double open_hi = 0.01;
  double closing_bid_prob = 0.5;

  void validate() const;
};

/// Bids of an honest auction where every escape point is given explicitly.
/// Bidder i bids in round-robin order starting with bidder 0.
BidSeries gen_honest_with_costs(const HonestGenConfig& config, const std::vector<double>& costs,
                                std::mt19937_64& rng);

BidSeries gen_honest(const HonestGenConfig& config, std::uint64_t seed);
BidSeries gen_honest(const HonestGenConfig& config, std::mt19937_64& rng);

BidSeries gen_taran(const TaranGenConfig& config, std::uint64_t seed);
BidSeries gen_taran(const TaranGenConfig& config, std::mt19937_64& rng);

/// Cartel series whose price falls unnaturally fast without a single cliff:
/// two alternating bidders each taking near-maximal legal decrements.
struct FastDropGenConfig {
  AuctionConfig auction{};
  double decrement_lo = 0.035;
  double decrement_hi = 0.05;
  int min_bids = 6;
  int max_bids = 20;

  void validate() const;
};

BidSeries gen_fast_drop(const FastDropGenConfig& config, std::mt19937_64& rng);

struct DatasetGenConfig {
  HonestGenConfig honest{};
  TaranGenConfig taran{};
  FastDropGenConfig fast_drop{};
  // Share of cartel series drawn from the fast-drop generator instead of taran.
  double fast_drop_share = 0.0;
};

/// Shuffled dataset with exactly n_honest honest and n_cartel cartel series.
/// Ids are assigned after shuffling ("A0001", ...), so they carry no label.
std::vector<BidSeries> gen_dataset(int n_honest, int n_cartel, const DatasetGenConfig& config,
                                   std::uint64_t seed);

}  // namespace kartel
