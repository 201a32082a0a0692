#pragma once

// Evolutionary population of two-player auction bidders. Each step pairs two
// distinct agents, plays an auction, and lets the loser copy the winner's
// strategy with probability equal to the winner's profit.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kartel/auction.hpp"

namespace kartel {

enum class StrategyType { Aggressive = 0, Passive = 1, Random = 2 };
inline constexpr std::size_t kStrategyCount = 3;

std::string to_string(StrategyType type);
DecrementPolicy policy_for(StrategyType type, const AuctionConfig& config = {});

struct Agent {
  int id = 0;
  StrategyType strategy = StrategyType::Passive;
  double cost = 0.0;
};

enum class CostMode {
  RedrawPerAuction,  // both costs drawn U[0,1] for every auction
  FixedPerAgent,     // cost drawn once at population construction
};

/// Integer head-counts of (aggressive, passive, random).
using StrategyCounts = std::array<int, kStrategyCount>;

class Population {
 public:
  static constexpr int kDefaultSize = 100;

  Population(const StrategyCounts& counts, std::uint64_t seed,
             CostMode cost_mode = CostMode::RedrawPerAuction);

  std::size_t size() const { return agents_.size(); }
  const std::vector<Agent>& agents() const { return agents_; }
  std::vector<Agent>& agents() { return agents_; }
  StrategyCounts counts() const;
  std::array<double, kStrategyCount> shares() const;
  CostMode cost_mode() const { return cost_mode_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::vector<Agent> agents_;
  std::mt19937_64 rng_;
  CostMode cost_mode_;
};

struct StepResult {
  int first_agent = 0;
  int second_agent = 0;
  AuctionOutcome outcome;
  bool converted = false;
};

/// The loser adopts the winner's strategy with probability `profit`
/// (clamped to [0,1]). Returns whether a conversion happened.
bool apply_imitation(Population& population, int winner, int loser, double profit);

/// One auction between two distinct uniformly drawn agents.
StepResult step(Population& population, const AuctionConfig& config = {});

struct TrajectoryPoint {
  long auction_index = 0;
  std::array<double, kStrategyCount> shares{};
};

struct SimulationRun {
  long n_auctions = 0;
  StrategyCounts initial_counts{};
  std::vector<TrajectoryPoint> trajectory;
  StrategyCounts final_counts{};

  double final_share(StrategyType type) const {
    return static_cast<double>(final_counts[static_cast<std::size_t>(type)]) /
           static_cast<double>(final_counts[0] + final_counts[1] + final_counts[2]);
  }
};

/// Converts shares to head-counts over `population_size` agents. Throws
/// InvalidMix unless the shares are nonnegative, sum to 1 and land on whole
/// agents (within 1e-9).
StrategyCounts mix_to_counts(const std::array<double, kStrategyCount>& shares,
                             int population_size = Population::kDefaultSize);

struct ExperimentConfig {
  std::array<double, kStrategyCount> initial_mix{};
  long n_auctions = 20000;
  long sample_every = 100;
  std::uint64_t seed = 1;
  CostMode cost_mode = CostMode::RedrawPerAuction;
  AuctionConfig auction{};
};

/// Trajectory samples at auction 0, every `sample_every` auctions and at the
/// final auction.
SimulationRun run_experiment(const ExperimentConfig& config);

}  // namespace kartel
