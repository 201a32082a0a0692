#include "kartel/generators.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>

#include "kartel/errors.hpp"

namespace kartel {

void HonestGenConfig::validate() const {
  auction.validate();
  if (n_bidders < 2) throw InvalidArgument("honest generator needs at least two bidders");
  if (!(cost_lo >= 0.0 && cost_lo <= cost_hi && cost_hi <= 1.0 - auction.min_decrement_frac)) {
    throw InvalidArgument(fmt::format(
        "escape range [{}, {}] must sit inside [0, 1 - min_decrement] so every auction has a bid",
        cost_lo, cost_hi));
  }
  if (!(jitter >= 0.0 && jitter <= auction.max_decrement_frac - auction.min_decrement_frac)) {
    throw InvalidArgument(fmt::format("jitter {} would leave the legal decrement range", jitter));
  }
}

void TaranGenConfig::validate() const {
  auction.validate();
  if (n_ram_bidders < 2) throw InvalidArgument("taran generator needs at least two ram bidders");
  if (n_cover_bidders < 1) throw InvalidArgument("taran generator needs at least one cover bidder");
  if (!(target_drop_frac > 0.05 && target_drop_frac < 1.0)) {
    throw InvalidArgument(fmt::format("target_drop_frac {} must lie in (0.05, 1)", target_drop_frac));
  }
  if (steps_to_target < 1) throw InvalidArgument("steps_to_target must be at least 1");
  if (!(open_lo > 0.0 && open_lo <= open_hi)) throw InvalidArgument("invalid opening decrement range");
  if (target_drop_frac - 2.0 * open_hi < steps_to_target * auction.min_decrement_frac) {
    throw InvalidArgument("target drop too small for the requested number of ram steps");
  }
  if (!(closing_bid_prob >= 0.0 && closing_bid_prob <= 1.0)) {
    throw InvalidArgument("closing_bid_prob must be a probability");
  }
}

void FastDropGenConfig::validate() const {
  auction.validate();
  if (!(decrement_lo >= auction.min_decrement_frac && decrement_lo <= decrement_hi &&
        decrement_hi <= auction.max_decrement_frac)) {
    throw InvalidArgument("fast-drop decrements must lie inside the legal bounds");
  }
  if (!(min_bids >= 1 && min_bids <= max_bids)) throw InvalidArgument("invalid fast-drop bid count range");
}

BidSeries gen_honest_with_costs(const HonestGenConfig& config, const std::vector<double>& costs,
                                std::mt19937_64& rng) {
  config.validate();
  const auto& a = config.auction;
  const int n = static_cast<int>(costs.size());
  if (n < 2) throw InvalidArgument("need at least two escape points");

  BidSeries series;
  series.start_price = a.start_price;
  series.label = Label::Honest;
  series.source = SeriesSource::Generated;

  std::vector<bool> active(static_cast<std::size_t>(n), true);
  int leader = -1;
  // Prices are start * (1 - (ticks * min + jitter_sum)) so that zero-jitter
  // series land exactly on 1 - min * k.
  long ticks = 0;
  double jitter_sum = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto contenders = [&] {
    int c = 0;
    for (int i = 0; i < n; ++i) c += (active[static_cast<std::size_t>(i)] && i != leader) ? 1 : 0;
    return c;
  };

  for (int turn = 0; contenders() > 0; turn = (turn + 1) % n) {
    if (!active[static_cast<std::size_t>(turn)] || turn == leader) continue;
    double extra = config.jitter > 0.0 ? config.jitter * unit(rng) : 0.0;
    // Jitter never pushes a bidder past its own escape point while a minimal
    // step is still affordable; it bids down to the escape point instead.
    const double base = static_cast<double>(ticks + 1) * a.min_decrement_frac + jitter_sum;
    const double escape_frac = 1.0 - costs[static_cast<std::size_t>(turn)] / a.start_price;
    if (extra > 0.0 && base + extra > escape_frac) extra = std::max(0.0, escape_frac - base);
    const double frac = base + extra;
    const double candidate = a.start_price * (1.0 - frac);
    if (candidate < costs[static_cast<std::size_t>(turn)] - kPriceTolerance || candidate < 0.0) {
      active[static_cast<std::size_t>(turn)] = false;
      continue;
    }
    if (static_cast<int>(series.bids.size()) == a.max_bids) {
      throw ExceededMaxBids(fmt::format("honest series exceeded max_bids = {}", a.max_bids));
    }
    ++ticks;
    jitter_sum += extra;
    series.bids.push_back(Bid{turn, candidate, static_cast<int>(series.bids.size())});
    leader = turn;
  }
  return series;
}

BidSeries gen_honest(const HonestGenConfig& config, std::mt19937_64& rng) {
  config.validate();
  std::uniform_real_distribution<double> cost(config.cost_lo * config.auction.start_price,
                                              config.cost_hi * config.auction.start_price);
  std::vector<double> costs(static_cast<std::size_t>(config.n_bidders));
  for (auto& c : costs) c = cost(rng);
  return gen_honest_with_costs(config, costs, rng);
}

BidSeries gen_honest(const HonestGenConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gen_honest(config, rng);
}

BidSeries gen_taran(const TaranGenConfig& config, std::mt19937_64& rng) {
  config.validate();
  const auto& a = config.auction;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  BidSeries series;
  series.start_price = a.start_price;
  series.label = Label::Cartel;
  series.source = SeriesSource::Generated;
  auto push = [&](int bidder, double price) {
    series.bids.push_back(Bid{bidder, price, static_cast<int>(series.bids.size())});
  };

  // Cover bidders are ids [0, n_cover), ram bidders follow.
  const int n_open = 1 + static_cast<int>(unit(rng) < 0.5);
  double frac = 0.0;
  int cover = 0;
  for (int k = 0; k < n_open; ++k) {
    frac += config.open_lo + (config.open_hi - config.open_lo) * unit(rng);
    push(cover, a.start_price * (1.0 - frac));
    cover = (cover + 1) % config.n_cover_bidders;
  }

  // Ram phase: the first step is the cliff, later steps are re-bids.
  const int steps = config.steps_to_target;
  const double slack = (config.target_drop_frac - frac) - steps * a.min_decrement_frac;
  std::vector<double> weights(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) weights[static_cast<std::size_t>(s)] = (s == 0 ? 3.0 : 0.5) + unit(rng);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (int s = 0; s < steps; ++s) {
    const int ram = config.n_cover_bidders + s % config.n_ram_bidders;
    if (s + 1 == steps) {
      frac = config.target_drop_frac;
    } else {
      frac += a.min_decrement_frac + slack * weights[static_cast<std::size_t>(s)] / wsum;
    }
    push(ram, a.start_price * (1.0 - frac));
  }

  if (unit(rng) < config.closing_bid_prob && frac + a.min_decrement_frac < 1.0) {
    frac += a.min_decrement_frac;
    push(cover, a.start_price * (1.0 - frac));
  }
  return series;
}

BidSeries gen_taran(const TaranGenConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gen_taran(config, rng);
}

BidSeries gen_fast_drop(const FastDropGenConfig& config, std::mt19937_64& rng) {
  config.validate();
  const auto& a = config.auction;
  BidSeries series;
  series.start_price = a.start_price;
  series.label = Label::Cartel;
  series.source = SeriesSource::Generated;
  const int n = std::uniform_int_distribution<int>(config.min_bids, config.max_bids)(rng);
  std::uniform_real_distribution<double> dec(config.decrement_lo, config.decrement_hi);
  double frac = 0.0;
  for (int k = 0; k < n; ++k) {
    const double next = frac + dec(rng);
    if (next >= 1.0) break;
    frac = next;
    series.bids.push_back(Bid{k % 2, a.start_price * (1.0 - frac), k});
  }
  return series;
}

std::vector<BidSeries> gen_dataset(int n_honest, int n_cartel, const DatasetGenConfig& config,
                                   std::uint64_t seed) {
  if (n_honest < 0 || n_cartel < 0) throw InvalidArgument("dataset sizes must be nonnegative");
  if (!(config.fast_drop_share >= 0.0 && config.fast_drop_share <= 1.0)) {
    throw InvalidArgument("fast_drop_share must be a probability");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<BidSeries> out;
  out.reserve(static_cast<std::size_t>(n_honest + n_cartel));
  for (int k = 0; k < n_honest; ++k) out.push_back(gen_honest(config.honest, rng));
  for (int k = 0; k < n_cartel; ++k) {
    if (config.fast_drop_share > 0.0 && unit(rng) < config.fast_drop_share) {
      out.push_back(gen_fast_drop(config.fast_drop, rng));
    } else {
      out.push_back(gen_taran(config.taran, rng));
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].auction_id = fmt::format("A{:04d}", i + 1);
  return out;
}

}  // namespace kartel
