#include "kartel/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "kartel/errors.hpp"

namespace kartel {

std::string to_string(StrategyType type) {
  switch (type) {
    case StrategyType::Aggressive: return "aggressive";
    case StrategyType::Passive: return "passive";
    case StrategyType::Random: return "random";
  }
  return "unknown";
}

DecrementPolicy policy_for(StrategyType type, const AuctionConfig& config) {
  switch (type) {
    case StrategyType::Aggressive: return DecrementPolicy::aggressive(config);
    case StrategyType::Passive: return DecrementPolicy::passive(config);
    case StrategyType::Random: return DecrementPolicy::random(config);
  }
  throw InvalidArgument("unknown strategy type");
}

Population::Population(const StrategyCounts& counts, std::uint64_t seed, CostMode cost_mode)
    : rng_(seed), cost_mode_(cost_mode) {
  int id = 0;
  for (std::size_t t = 0; t < kStrategyCount; ++t) {
    if (counts[t] < 0) throw InvalidMix("negative strategy count");
    for (int k = 0; k < counts[t]; ++k) {
      agents_.push_back(Agent{id++, static_cast<StrategyType>(t), 0.0});
    }
  }
  if (agents_.size() < 2) throw InvalidMix("population needs at least two agents");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& a : agents_) a.cost = unit(rng_);
}

StrategyCounts Population::counts() const {
  StrategyCounts c{};
  for (const auto& a : agents_) ++c[static_cast<std::size_t>(a.strategy)];
  return c;
}

std::array<double, kStrategyCount> Population::shares() const {
  const auto c = counts();
  const double n = static_cast<double>(agents_.size());
  return {c[0] / n, c[1] / n, c[2] / n};
}

bool apply_imitation(Population& population, int winner, int loser, double profit) {
  auto& agents = population.agents();
  const double p = std::clamp(profit, 0.0, 1.0);
  // u in [0,1): p = 0 never converts, p = 1 always does.
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(population.rng());
  if (u >= p) return false;
  agents[static_cast<std::size_t>(loser)].strategy = agents[static_cast<std::size_t>(winner)].strategy;
  return true;
}

StepResult step(Population& population, const AuctionConfig& config) {
  auto& rng = population.rng();
  auto& agents = population.agents();
  const int n = static_cast<int>(agents.size());
  if (n < 2) throw InvalidArgument("population needs at least two agents");

  StepResult r;
  r.first_agent = std::uniform_int_distribution<int>(0, n - 1)(rng);
  r.second_agent = std::uniform_int_distribution<int>(0, n - 2)(rng);
  if (r.second_agent >= r.first_agent) ++r.second_agent;

  auto& a = agents[static_cast<std::size_t>(r.first_agent)];
  auto& b = agents[static_cast<std::size_t>(r.second_agent)];
  if (population.cost_mode() == CostMode::RedrawPerAuction) {
    std::uniform_real_distribution<double> cost(0.0, config.start_price);
    a.cost = cost(rng);
    b.cost = cost(rng);
  }
  const std::array<Bidder, 2> bidders{Bidder{a.cost, policy_for(a.strategy, config)},
                                      Bidder{b.cost, policy_for(b.strategy, config)}};
  const int first = std::uniform_int_distribution<int>(0, 1)(rng);
  r.outcome = play_auction(config, bidders, first, rng);

  if (r.outcome.winner_id) {
    const bool first_won = *r.outcome.winner_id == 0;
    const int winner = first_won ? r.first_agent : r.second_agent;
    const int loser = first_won ? r.second_agent : r.first_agent;
    // Profit is in price units; conversion probability is profit relative to start.
    r.converted = apply_imitation(population, winner, loser, r.outcome.winner_profit / config.start_price);
  }
  return r;
}

StrategyCounts mix_to_counts(const std::array<double, kStrategyCount>& shares, int population_size) {
  if (population_size < 2) throw InvalidMix("population size must be at least 2");
  StrategyCounts counts{};
  double total = 0.0;
  int count_total = 0;
  for (std::size_t t = 0; t < kStrategyCount; ++t) {
    const double s = shares[t];
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidMix(fmt::format("share {} is negative or not finite", s));
    const double scaled = s * population_size;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9 * population_size) {
      throw InvalidMix(fmt::format("share {} is not a whole number of agents out of {}", s, population_size));
    }
    counts[t] = static_cast<int>(rounded);
    total += s;
    count_total += counts[t];
  }
  if (std::abs(total - 1.0) > 1e-9 || count_total != population_size) {
    throw InvalidMix(fmt::format("shares must sum to 1, got {}", total));
  }
  return counts;
}

SimulationRun run_experiment(const ExperimentConfig& config) {
  if (config.n_auctions < 0) throw InvalidArgument("n_auctions must be nonnegative");
  if (config.sample_every <= 0) throw InvalidArgument("sample_every must be positive");
  config.auction.validate();

  SimulationRun run;
  run.n_auctions = config.n_auctions;
  run.initial_counts = mix_to_counts(config.initial_mix);
  Population population(run.initial_counts, config.seed, config.cost_mode);

  run.trajectory.push_back({0, population.shares()});
  for (long t = 1; t <= config.n_auctions; ++t) {
    step(population, config.auction);
    if (t % config.sample_every == 0 || t == config.n_auctions) {
      run.trajectory.push_back({t, population.shares()});
    }
  }
  run.final_counts = population.counts();
  return run;
}

}  // namespace kartel
