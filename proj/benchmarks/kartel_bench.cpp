#include <benchmark/benchmark.h>

#include "kartel/features.hpp"
#include "kartel/gbdt.hpp"
#include "kartel/generators.hpp"
#include "kartel/shapley.hpp"
#include "kartel/simulation.hpp"

namespace {

using namespace kartel;

void BM_PlayAuction(benchmark::State& state) {
  const std::array<Bidder, 2> bidders{Bidder{0.1, DecrementPolicy::passive()}, Bidder{0.2, DecrementPolicy::random()}};
  std::mt19937_64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(play_auction(AuctionConfig{}, bidders, 0, rng));
}
BENCHMARK(BM_PlayAuction);

void BM_RunExperiment(benchmark::State& state) {
  ExperimentConfig c;
  c.initial_mix = {0.34, 0.33, 0.33};
  c.n_auctions = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunExperiment)->Arg(20000)->Unit(benchmark::kMillisecond);

struct Dataset {
  std::vector<FeatureVector> rows;
  FeatureMatrix X;
  std::vector<int> y;
};

Dataset make_dataset(int per_class) {
  DatasetGenConfig c;
  c.honest.jitter = 0.045;
  c.fast_drop_share = 1.0;
  c.fast_drop.decrement_lo = 0.02;
  Dataset d;
  d.rows = to_features(gen_dataset(per_class, per_class, c, 1));
  d.X = FeatureMatrix::from_vectors(d.rows);
  d.y = labels_of(d.rows);
  return d;
}

void BM_Fit(benchmark::State& state) {
  const auto d = make_dataset(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit(d.X, d.y, Hyperparams{100, 3, 0.1, 1, 1.0}));
}
BENCHMARK(BM_Fit)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ExactShapley(benchmark::State& state) {
  const auto d = make_dataset(20);
  const auto model = fit(d.X, d.y, Hyperparams{100, 3, 0.1, 1, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(exact_shapley(model, d.rows[0], d.X));
}
BENCHMARK(BM_ExactShapley)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
