#pragma once

// Open descending-price (reverse) auction mechanics.
//
// Prices are real-valued. Every decrement is quoted as a fraction of the
// ORIGINAL start price: with start 100 and bounds [0.5%, 5%] a bid from any
// current price p may land in [p - 5, p - 0.5].

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace kartel {

/// Absolute tolerance used when comparing prices and decrement fractions.
inline constexpr double kPriceTolerance = 1e-12;

struct AuctionConfig {
  double start_price = 1.0;
  double min_decrement_frac = 0.005;
  double max_decrement_frac = 0.05;
  int max_bids = 512;

  /// Throws InvalidArgument unless 0 < min <= max < 1, start > 0, max_bids > 0.
  void validate() const;
  double min_decrement() const { return min_decrement_frac * start_price; }
  double max_decrement() const { return max_decrement_frac * start_price; }
};

enum class Label { Honest = 0, Cartel = 1 };
enum class SeriesSource { Simulated, Generated, Ingested };

std::string to_string(Label label);
std::optional<Label> parse_label(const std::string& text);
std::string to_string(SeriesSource source);

struct Bid {
  int bidder_id = 0;
  double price = 0.0;  // absolute price after this bid
  int index = 0;
};

struct BidSeries {
  std::string auction_id;
  double start_price = 1.0;
  std::vector<Bid> bids;
  std::optional<Label> label;
  SeriesSource source = SeriesSource::Generated;
  // Optional external names, indexed by Bid::bidder_id.
  std::vector<std::string> bidder_names;

  std::vector<double> normalized_prices() const;
  /// Decrement of each bid as a fraction of the start price; the first is
  /// measured from the start price itself.
  std::vector<double> decrement_fractions() const;
  bool strictly_decreasing() const;
  std::string bidder_name(int bidder_id) const;
};

struct AuctionOutcome {
  std::optional<int> winner_id;
  double final_price = 0.0;
  double winner_profit = 0.0;
  int n_bids = 0;
};

/// Closed interval of absolute prices a next bid may land in.
struct NextPriceBounds {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return hi < lo; }
  bool contains(double price, double tol = kPriceTolerance) const {
    return price >= lo - tol && price <= hi + tol;
  }
};

/// Legal landing interval for the next bid from `current_price`. The lower
/// end is floored at 0. Requires current_price > 0.
NextPriceBounds legal_decrement_bounds(const AuctionConfig& config, double current_price);

/// How a bidder picks its decrement: a fixed fraction, or a fresh uniform draw
/// on [lo, hi] for every bid. Fractions are of the start price.
class DecrementPolicy {
 public:
  static DecrementPolicy fixed(double frac);
  static DecrementPolicy uniform(double lo, double hi);

  static DecrementPolicy passive(const AuctionConfig& c = {}) { return fixed(c.min_decrement_frac); }
  static DecrementPolicy aggressive(const AuctionConfig& c = {}) { return fixed(c.max_decrement_frac); }
  static DecrementPolicy random(const AuctionConfig& c = {}) {
    return uniform(c.min_decrement_frac, c.max_decrement_frac);
  }

  double draw(std::mt19937_64& rng) const;
  bool is_fixed() const { return lo_ == hi_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  DecrementPolicy(double lo, double hi) : lo_(lo), hi_(hi) {}
  double lo_;
  double hi_;
};

struct Bidder {
  double cost = 0.0;
  DecrementPolicy policy = DecrementPolicy::passive();
};

struct AuctionResult {
  BidSeries series;
  AuctionOutcome outcome;
};

/// Two-player alternating auction. The mover draws a decrement; it bids only
/// if the resulting price is >= its cost, otherwise it declines and the last
/// bidder wins at the current price. Throws ExceededMaxBids if the loop runs
/// past config.max_bids.
AuctionResult run_auction(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                          int first_mover, std::mt19937_64& rng);

/// Same, with the first mover drawn uniformly from the seeded generator.
AuctionResult run_auction(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                          std::mt19937_64& rng);
AuctionResult run_auction(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                          std::uint64_t seed);

/// Outcome only; skips building the bid series. Used by the simulation loop.
AuctionOutcome play_auction(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                            int first_mover, std::mt19937_64& rng);

}  // namespace kartel
