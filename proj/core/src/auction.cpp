#include "kartel/auction.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "kartel/errors.hpp"

namespace kartel {

void AuctionConfig::validate() const {
  if (!(start_price > 0.0)) {
    throw InvalidArgument(fmt::format("start_price must be positive, got {}", start_price));
  }
  if (!(min_decrement_frac > 0.0 && min_decrement_frac <= max_decrement_frac &&
        max_decrement_frac < 1.0)) {
    throw InvalidArgument(fmt::format("decrement bounds must satisfy 0 < min <= max < 1, got [{}, {}]",
                                      min_decrement_frac, max_decrement_frac));
  }
  if (max_bids <= 0) throw InvalidArgument("max_bids must be positive");
}

std::string to_string(Label label) { return label == Label::Honest ? "honest" : "cartel"; }

std::optional<Label> parse_label(const std::string& text) {
  if (text == "honest" || text == "0") return Label::Honest;
  if (text == "cartel" || text == "1") return Label::Cartel;
  return std::nullopt;
}

std::string to_string(SeriesSource source) {
  switch (source) {
    case SeriesSource::Simulated: return "simulated";
    case SeriesSource::Generated: return "generated";
    case SeriesSource::Ingested: return "ingested";
  }
  return "unknown";
}

std::vector<double> BidSeries::normalized_prices() const {
  std::vector<double> out;
  out.reserve(bids.size());
  for (const auto& b : bids) out.push_back(b.price / start_price);
  return out;
}

std::vector<double> BidSeries::decrement_fractions() const {
  std::vector<double> out;
  out.reserve(bids.size());
  double prev = start_price;
  for (const auto& b : bids) {
    out.push_back((prev - b.price) / start_price);
    prev = b.price;
  }
  return out;
}

bool BidSeries::strictly_decreasing() const {
  double prev = start_price;
  for (const auto& b : bids) {
    if (!(b.price < prev)) return false;
    prev = b.price;
  }
  return true;
}

std::string BidSeries::bidder_name(int bidder_id) const {
  if (bidder_id >= 0 && static_cast<std::size_t>(bidder_id) < bidder_names.size()) {
    return bidder_names[static_cast<std::size_t>(bidder_id)];
  }
  return std::to_string(bidder_id);
}

NextPriceBounds legal_decrement_bounds(const AuctionConfig& config, double current_price) {
  if (!(current_price > 0.0)) {
    throw InvalidArgument(fmt::format("current price must be positive, got {}", current_price));
  }
  return {std::max(0.0, current_price - config.max_decrement()),
          current_price - config.min_decrement()};
}

DecrementPolicy DecrementPolicy::fixed(double frac) {
  if (!(frac > 0.0 && frac < 1.0)) {
    throw InvalidArgument(fmt::format("decrement fraction must be in (0, 1), got {}", frac));
  }
  return DecrementPolicy(frac, frac);
}

DecrementPolicy DecrementPolicy::uniform(double lo, double hi) {
  if (!(lo > 0.0 && lo <= hi && hi < 1.0)) {
    throw InvalidArgument(fmt::format("uniform decrement range must satisfy 0 < lo <= hi < 1, got [{}, {}]", lo, hi));
  }
  return DecrementPolicy(lo, hi);
}

double DecrementPolicy::draw(std::mt19937_64& rng) const {
  if (is_fixed()) return lo_;
  return std::uniform_real_distribution<double>(lo_, hi_)(rng);
}

namespace {

void check_inputs(const AuctionConfig& config, const std::array<Bidder, 2>& bidders, int first_mover) {
  config.validate();
  if (first_mover != 0 && first_mover != 1) throw InvalidArgument("first_mover must be 0 or 1");
  for (const auto& b : bidders) {
    if (!(b.cost >= 0.0 && b.cost <= config.start_price)) {
      throw InvalidArgument(fmt::format("bidder cost {} outside [0, start_price]", b.cost));
    }
    const double tol = kPriceTolerance;
    if (b.policy.lo() < config.min_decrement_frac - tol || b.policy.hi() > config.max_decrement_frac + tol) {
      throw InvalidArgument("bidder policy decrements outside the legal bounds");
    }
  }
}

template <typename OnBid>
AuctionOutcome play(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                    int first_mover, std::mt19937_64& rng, OnBid&& on_bid) {
  check_inputs(config, bidders, first_mover);
  AuctionOutcome outcome;
  outcome.final_price = config.start_price;
  double price = config.start_price;
  int mover = first_mover;
  for (;;) {
    const Bidder& b = bidders[static_cast<std::size_t>(mover)];
    const double candidate = price - b.policy.draw(rng) * config.start_price;
    if (candidate < b.cost - kPriceTolerance) break;
    if (outcome.n_bids == config.max_bids) {
      throw ExceededMaxBids(fmt::format("auction exceeded max_bids = {}", config.max_bids));
    }
    price = std::max(candidate, 0.0);
    on_bid(Bid{mover, price, outcome.n_bids});
    outcome.winner_id = mover;
    ++outcome.n_bids;
    mover ^= 1;
  }
  outcome.final_price = price;
  if (outcome.winner_id) {
    const double cost = bidders[static_cast<std::size_t>(*outcome.winner_id)].cost;
    outcome.winner_profit = std::max(0.0, price - cost);
  }
  return outcome;
}

}  // namespace

AuctionResult run_auction(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                          int first_mover, std::mt19937_64& rng) {
  AuctionResult result;
  result.series.start_price = config.start_price;
  result.series.source = SeriesSource::Simulated;
  result.outcome = play(config, bidders, first_mover, rng,
                        [&](const Bid& bid) { result.series.bids.push_back(bid); });
  return result;
}

AuctionResult run_auction(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                          std::mt19937_64& rng) {
  const int first = static_cast<int>(std::uniform_int_distribution<int>(0, 1)(rng));
  return run_auction(config, bidders, first, rng);
}

AuctionResult run_auction(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return run_auction(config, bidders, rng);
}

AuctionOutcome play_auction(const AuctionConfig& config, const std::array<Bidder, 2>& bidders,
                            int first_mover, std::mt19937_64& rng) {
  return play(config, bidders, first_mover, rng, [](const Bid&) {});
}

}  // namespace kartel
