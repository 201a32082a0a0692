// Acceptance checks. One PASS/FAIL line per criterion; pass a criterion
// number to run just that one. Exit status is nonzero if any selected
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kartel/dataset_io.hpp"
#include "kartel/errors.hpp"
#include "kartel/features.hpp"
#include "kartel/gbdt.hpp"
#include "kartel/generators.hpp"
#include "kartel/shapley.hpp"
#include "kartel/simulation.hpp"
#include "support/oracles.hpp"

namespace {

using namespace kartel;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok: " : "violated: ") + std::move(what));
  }
  void note(std::string what) { notes.push_back(std::move(what)); }
};

std::string fmt_double(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. Passive bidders take over the population.
Outcome simulation_convergence() {
  Outcome o;
  struct Case {
    const char* name;
    std::array<double, 3> mix;
    long auctions;
  };
  const Case cases[] = {{"mix 0.34,0.33,0.33 @20000", {0.34, 0.33, 0.33}, 20000},
                        {"mix 0.45,0.10,0.45 @20000", {0.45, 0.10, 0.45}, 20000},
                        {"mix 0.87,0.03,0.10 @50000", {0.87, 0.03, 0.10}, 50000}};
  const auto t0 = Clock::now();
  for (const auto& c : cases) {
    std::vector<double> finals;
    int rising = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      ExperimentConfig cfg;
      cfg.initial_mix = c.mix;
      cfg.n_auctions = c.auctions;
      cfg.seed = seed;
      const auto run = run_experiment(cfg);
      finals.push_back(run.final_share(StrategyType::Passive));
      rising += run.trajectory.back().shares[1] > run.trajectory.front().shares[1] ? 1 : 0;
    }
    const double med = median(finals);
    o.check(med >= 0.95, std::string(c.name) + ": median final passive share " + fmt_double(med) + " >= 0.95");
    o.check(rising == 10, std::string(c.name) + ": passive share rose in " + std::to_string(rising) + "/10 runs");
  }
  const double secs = seconds_since(t0);
  o.check(secs < 30.0, "runtime " + fmt_double(secs, 3) + " s < 30 s");
  return o;
}

// 2. Conditional on winning, the minimal decrement earns at least as much as
// any other fixed decrement against the same opponent.
Outcome minimal_decrement_dominance() {
  Outcome o;
  const AuctionConfig config;
  const int grid = 50;
  const std::vector<double> opponents{0.005, 0.01, 0.02, 0.03, 0.04, 0.05};
  std::vector<double> alternatives;
  for (int k = 6; k <= 50; ++k) alternatives.push_back(k / 1000.0);

  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  long comparisons = 0;
  long violations = 0;
  double worst = 0.0;
  std::string worst_case;
  long aggregate_losses = 0;
  for (double opp : opponents) {
    for (double alt : alternatives) {
      double passive_total = 0.0;
      double alt_total = 0.0;
      for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
          const double own = (i + 0.5) / grid;
          const double other = (j + 0.5) / grid;
          for (int first : {0, 1}) {
            const Bidder rival{other, DecrementPolicy::fixed(opp)};
            const auto p = play_auction(config, {Bidder{own, DecrementPolicy::passive()}, rival}, first, rng);
            const auto a = play_auction(config, {Bidder{own, DecrementPolicy::fixed(alt)}, rival}, first, rng);
            const bool p_won = p.winner_id == 0;
            const bool a_won = a.winner_id == 0;
            if (p_won) passive_total += p.winner_profit;
            if (a_won) alt_total += a.winner_profit;
            if (!(p_won && a_won)) continue;
            ++comparisons;
            const double excess = a.winner_profit - p.winner_profit;
            if (excess > kPriceTolerance) {
              ++violations;
              if (excess > worst) {
                worst = excess;
                worst_case = "costs (" + fmt_double(own) + ", " + fmt_double(other) + "), opponent " +
                             fmt_double(opp) + ", alternative " + fmt_double(alt) + ", first mover " +
                             std::to_string(first);
              }
            }
          }
        }
      }
      if (alt_total > passive_total + kPriceTolerance) {
        ++aggregate_losses;
        o.note("aggregate: opponent " + fmt_double(opp) + ", alternative " + fmt_double(alt) + " earns " +
               fmt_double(alt_total, 8) + " vs passive " + fmt_double(passive_total, 8));
      }
    }
  }
  const double secs = seconds_since(t0);
  o.check(violations == 0, std::to_string(violations) + " of " + std::to_string(comparisons) +
                               " joint wins where another fixed decrement beat passive");
  if (violations > 0) o.note("largest excess " + fmt_double(worst) + " at " + worst_case);
  o.note("policies out-earning passive in total over the grid: " + std::to_string(aggregate_losses) + " of " +
         std::to_string(opponents.size() * alternatives.size()));
  o.check(secs < 10.0, "runtime " + fmt_double(secs, 3) + " s < 10 s");
  return o;
}

// 3. Synthetic analogue of the confusion-table experiment.
Outcome synthetic_pipeline() {
  Outcome o;
  const auto t0 = Clock::now();
  std::vector<double> accuracies;
  CvPlan plan{0.7, 5, CvPlan::default_grid()};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto series = gen_dataset(20, 20, DatasetGenConfig{}, seed);
    const auto fv = to_features(series);
    const auto r = train_and_evaluate(FeatureMatrix::from_vectors(fv), labels_of(fv), plan, seed);
    accuracies.push_back(r.test_report.accuracy);
  }
  std::string all;
  for (double a : accuracies) all += fmt_double(a, 3) + " ";
  o.note("test accuracies: " + all);
  const double med = median(accuracies);
  o.check(med >= 0.90, "median accuracy " + fmt_double(med) + " >= 0.90");
  const double lowest = *std::min_element(accuracies.begin(), accuracies.end());
  o.check(lowest > 0.5, "every run beats 0.5 (lowest " + fmt_double(lowest) + ")");
  const double secs = seconds_since(t0);
  o.check(secs < 60.0, "runtime " + fmt_double(secs, 3) + " s < 60 s");
  return o;
}

// 4. Analytic logistic derivatives against finite differences.
Outcome gradient_check() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::bernoulli_distribution coin(0.5);
  double worst_g = 0.0;
  double worst_h = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int y = coin(rng) ? 1 : 0;
    const double p = u(rng);
    const auto an = logistic_loss_grad_hess(y, p);
    const auto fd = testing::finite_difference(y, p);
    worst_g = std::max(worst_g, std::abs(an.grad - fd.grad));
    worst_h = std::max(worst_h, std::abs(an.hess - fd.hess));
  }
  o.check(worst_g <= 1e-6, "max |grad - fd| " + fmt_double(worst_g) + " <= 1e-6 over 1000 pairs");
  o.check(worst_h <= 1e-6, "max |hess - fd| " + fmt_double(worst_h) + " <= 1e-6 over 1000 pairs");
  return o;
}

Tree stump(int feature, double threshold, double left, double right) {
  Tree t;
  t.nodes = {TreeNode{feature, threshold, 0.0, 1, 2}, TreeNode{-1, 0.0, left, -1, -1},
             TreeNode{-1, 0.0, right, -1, -1}};
  return t;
}

GbdtModel fit_generated(const DatasetGenConfig& gen, std::uint64_t seed, std::vector<FeatureVector>& fv) {
  fv = to_features(gen_dataset(60, 60, gen, seed));
  const auto X = FeatureMatrix::from_vectors(fv);
  return fit(X, labels_of(fv), Hyperparams{25, 3, 0.3, 1, 1.0});
}

// 5. Shapley axioms and agreement with permutation sampling.
Outcome shapley_properties() {
  Outcome o;
  // Clean classes: the model needs few positions, leaving null players.
  std::vector<FeatureVector> clean_fv;
  DatasetGenConfig clean;
  clean.honest.jitter = 0.005;
  clean.fast_drop_share = 0.25;
  const auto clean_model = fit_generated(clean, 5, clean_fv);
  // Overlapping classes: near-legal fast drops against jittery honest series,
  // so the model spreads over many positions.
  std::vector<FeatureVector> fv;
  DatasetGenConfig overlap;
  overlap.honest.jitter = 0.045;
  overlap.fast_drop_share = 1.0;
  overlap.fast_drop.decrement_lo = 0.02;
  const auto model = fit_generated(overlap, 5, fv);
  const auto X = FeatureMatrix::from_vectors(fv);

  double worst_gap = 0.0;
  for (const auto* m : {&clean_model, &model}) {
    const auto& data = m == &model ? fv : clean_fv;
    const auto bg = FeatureMatrix::from_vectors(data);
    for (const auto& point : data) worst_gap = std::max(worst_gap, exact_shapley(*m, point, bg).efficiency_gap());
  }
  o.check(worst_gap < 1e-9, "efficiency gap " + fmt_double(worst_gap) + " < 1e-9 on all " +
                                std::to_string(fv.size() + clean_fv.size()) + " points of two models");

  std::vector<bool> used(static_cast<std::size_t>(clean_model.n_features), false);
  for (const auto& t : clean_model.trees) {
    for (int f : t.used_features()) used[static_cast<std::size_t>(f)] = true;
  }
  bool null_exact = true;
  int null_checked = 0;
  const auto clean_bg = FeatureMatrix::from_vectors(clean_fv);
  for (const auto& point : clean_fv) {
    const auto e = exact_shapley(clean_model, point, clean_bg);
    for (std::size_t i = 0; i < used.size(); ++i) {
      if (used[i]) continue;
      ++null_checked;
      if (e.phis[i] != 0.0) null_exact = false;
    }
  }
  o.check(null_checked > 0 && null_exact,
          "phi == 0 exactly for features absent from all trees (" + std::to_string(null_checked) + " checks)");

  // Symmetric model over two duplicated columns.
  GbdtModel sym;
  sym.n_features = 3;
  sym.learning_rate = 1.0;
  sym.trees = {stump(0, 0.5, -1.0, 1.0), stump(1, 0.5, -1.0, 1.0), stump(2, 0.4, 0.3, -0.2)};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeatureMatrix bg(40, 3);
  for (std::size_t r = 0; r < bg.rows(); ++r) {
    bg(r, 0) = bg(r, 1) = u(rng);
    bg(r, 2) = u(rng);
  }
  double worst_sym = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double d = u(rng);
    const std::vector<double> x{d, d, u(rng)};
    const auto e = exact_shapley(proba_of(sym), x, bg);
    worst_sym = std::max(worst_sym, std::abs(e.phis[0] - e.phis[1]));
  }
  o.check(worst_sym <= 1e-9, "duplicated columns: max |phi_0 - phi_1| " + fmt_double(worst_sym) + " <= 1e-9");

  // Permutation sampling on 5 random points against a 40-row background.
  std::vector<std::size_t> rows(X.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::shuffle(rows.begin(), rows.end(), rng);
  const std::vector<std::size_t> bg_rows(rows.begin(), rows.begin() + 40);
  const auto background = X.select_rows(bg_rows);
  const auto f = proba_of(model);
  double worst_z = 0.0;
  bool within = true;
  int spread = 0;
  for (int k = 0; k < 5; ++k) {
    const auto x = X.row(rows[40 + static_cast<std::size_t>(k)]);
    const auto exact = exact_shapley(f, x, background);
    const auto sampled = testing::permutation_shapley(f, x, background, 20000, 1000 + static_cast<std::uint64_t>(k));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double diff = std::abs(exact.phis[i] - sampled.mean[i]);
      // A zero standard error means every sampled marginal was identical;
      // only rounding can separate the two then.
      if (diff > 3.0 * sampled.std_error[i] + 1e-12) within = false;
      if (sampled.std_error[i] > 0.0) {
        worst_z = std::max(worst_z, diff / sampled.std_error[i]);
        ++spread;
      }
    }
  }
  o.check(within, "permutation estimate (20000 permutations, 5 points) within 3 SE, worst z " + fmt_double(worst_z, 3) +
                      ", " + std::to_string(spread) + " of 55 values with sampling spread");
  return o;
}

// 6. Feature pipeline goldens.
Outcome feature_goldens() {
  Outcome o;
  BidSeries three;
  three.start_price = 1.0;
  three.bids = {{0, 0.995, 0}, {1, 0.990, 1}, {0, 0.985, 2}};
  const std::vector<double> expected{0.995, 0.990, 0.985, 0.985, 0.985, 0.985, 0.985, 0.985, 0.985, 0.985, 0.985};
  o.check(to_features(three).values == expected, "3-bid example pads to [0.995, 0.990, 0.985 x 9]");

  BidSeries longer;
  longer.start_price = 1.0;
  for (int k = 0; k < 234; ++k) longer.bids.push_back({k % 2, 1.0 - 0.002 * (k + 1), k});
  const auto t = to_features(longer).values;
  bool prefix = t.size() == 11;
  for (std::size_t k = 0; prefix && k < 11; ++k) prefix = t[k] == longer.bids[k].price;
  o.check(prefix, "234-bid series truncates to exactly its first 11 prices");

  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = gen_honest(HonestGenConfig{}, seed);
    const auto p = s.normalized_prices();
    for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, std::abs(p[k] - (1.0 - 0.005 * double(k + 1))));
  }
  o.check(worst <= 1e-12, "zero-jitter honest series follow 1 - 0.005k (max error " + fmt_double(worst) + ")");
  return o;
}

// 7. Persistence round trips and format goldens.
Outcome persistence() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path data{KARTEL_TEST_DATA_DIR};

  const auto fv = to_features(gen_dataset(40, 40, DatasetGenConfig{}, 7));
  const auto X = FeatureMatrix::from_vectors(fv);
  const auto model = fit(X, labels_of(fv), Hyperparams{50, 3, 0.3, 1, 1.0});
  const auto path = fs::temp_directory_path() / "kartel_acceptance_model.json";
  save_model(path, model);
  const auto back = load_model(path);
  fs::remove(path);
  bool identical = true;
  for (std::size_t i = 0; i < X.rows(); ++i) identical = identical && model.predict_proba(X.row(i)) == back.predict_proba(X.row(i));
  o.check(identical, "model save/load gives bit-identical predictions on " + std::to_string(X.rows()) + " rows");

  const auto ingested = read_auctions(data / "taran_case.csv");
  std::vector<int> flagged;
  for (const auto& w : ingested.warnings) flagged.push_back(w.bid_index);
  o.check(flagged == std::vector<int>{1, 2}, "taran case warns on exactly bids 1 and 2 (got " +
                                                 std::to_string(flagged.size()) + " warnings)");
  bool decreasing = ingested.series.size() == 1;
  if (decreasing) {
    const auto p = ingested.series[0].normalized_prices();
    for (std::size_t k = 1; k < p.size(); ++k) decreasing = decreasing && p[k] < p[k - 1];
    decreasing = decreasing && p.front() < 1.0;
  }
  o.check(decreasing, "taran case normalizes to a strictly decreasing series");

  std::ifstream golden_in(data / "table_report.txt", std::ios::binary);
  std::stringstream golden;
  golden << golden_in.rdbuf();
  o.check(format_report(EvalReport::from_fractions(0.41, 0.0, 0.09, 0.50)) == golden.str(),
          "report for 41/0/9/50 matches the golden table with accuracy 91%");
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"simulation convergence to passive bidding", simulation_convergence},
      {"minimal-decrement dominance over a 50x50 cost grid", minimal_decrement_dominance},
      {"synthetic confusion-table pipeline", synthetic_pipeline},
      {"logistic gradient/hessian vs finite differences", gradient_check},
      {"Shapley efficiency, null player, symmetry, sampling agreement", shapley_properties},
      {"feature pipeline goldens", feature_goldens},
      {"persistence round trips and report golden", persistence},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected.push_back(k);
  }
  if (selected.empty()) {
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);
  }

  int failed = 0;
  for (int k : selected) {
    const auto& c = criteria[static_cast<std::size_t>(k - 1)];
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", k, c.title);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
