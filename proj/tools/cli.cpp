#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kartel/csv.hpp"
#include "kartel/dataset_io.hpp"
#include "kartel/errors.hpp"
#include "kartel/features.hpp"
#include "kartel/gbdt.hpp"
#include "kartel/generators.hpp"
#include "kartel/shapley.hpp"
#include "kartel/simulation.hpp"
#include "kartel/svg.hpp"

namespace kartel::cli {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument(fmt::format("cannot open '{}' for writing", path));
  out << text;
}

std::array<double, kStrategyCount> parse_mix(const std::string& text) {
  const auto parts = csv::split_line(text);
  if (parts.size() != kStrategyCount) {
    throw InvalidMix(fmt::format("--mix needs three comma-separated shares (aggressive,passive,random), got '{}'", text));
  }
  std::array<double, kStrategyCount> mix{};
  for (std::size_t i = 0; i < kStrategyCount; ++i) {
    try {
      mix[i] = csv::parse_double(parts[i]);
    } catch (const ParseError&) {
      throw InvalidMix(fmt::format("--mix share '{}' is not a number", parts[i]));
    }
  }
  return mix;
}

struct Labeled {
  std::vector<FeatureVector> rows;
  FeatureMatrix X;
  std::vector<int> y;
};

Labeled load_labeled(const std::string& path) {
  Labeled d;
  d.rows = read_features(std::filesystem::path(path));
  if (d.rows.empty()) throw DegenerateData(fmt::format("'{}' contains no rows", path));
  d.X = FeatureMatrix::from_vectors(d.rows);
  d.y = labels_of(d.rows);
  return d;
}

FeatureMatrix load_background(const std::string& path, const std::vector<FeatureVector>& fallback) {
  if (path.empty()) return FeatureMatrix::from_vectors(fallback);
  const auto rows = read_features(std::filesystem::path(path));
  return FeatureMatrix::from_vectors(rows);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collusion screening for descending-price procurement auctions", "kartel"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::uint64_t seed = 1;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed (falls back to $KARTEL_SEED, then 1)")->envname("KARTEL_SEED");
  };

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Evolutionary strategy-imitation experiment");
  std::string mix_text;
  long n_auctions = 20000;
  long sample_every = 100;
  std::string sim_out;
  std::string sim_svg;
  bool fixed_costs = false;
  simulate->add_option("--mix", mix_text, "Initial shares aggressive,passive,random over 100 agents")->required();
  simulate->add_option("--auctions", n_auctions, "Number of auctions")->check(CLI::NonNegativeNumber);
  simulate->add_option("--sample-every", sample_every, "Trajectory sampling interval")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim_out, "Trajectory CSV")->required();
  simulate->add_option("--svg", sim_svg, "Optional line chart");
  simulate->add_flag("--fixed-costs", fixed_costs, "Draw each agent's cost once instead of per auction");
  add_seed(simulate);

  // generate
  auto* generate = app.add_subcommand("generate", "Synthetic labeled bid histories");
  int n_honest = 20;
  int n_cartel = 20;
  std::string gen_out;
  double start_price = 1000000.0;
  DatasetGenConfig gen_config;
  generate->add_option("--honest", n_honest, "Number of honest auctions")->check(CLI::NonNegativeNumber);
  generate->add_option("--cartel", n_cartel, "Number of cartel auctions")->check(CLI::NonNegativeNumber);
  generate->add_option("--out", gen_out, "Auctions CSV")->required();
  generate->add_option("--start-price", start_price, "Start price written to the file")->check(CLI::PositiveNumber);
  generate->add_option("--jitter", gen_config.honest.jitter, "Honest decrement jitter (fraction of start)");
  generate->add_option("--target-drop", gen_config.taran.target_drop_frac, "Taran total drop (fraction of start)");
  generate->add_option("--fast-drop-share", gen_config.fast_drop_share, "Share of cartel series using the fast-drop variant");
  add_seed(generate);

  // featurize
  auto* featurize = app.add_subcommand("featurize", "Fixed-length feature vectors from an auctions CSV");
  std::string feat_in;
  std::string feat_out;
  int length = kDefaultSeriesLength;
  bool decrements = false;
  featurize->add_option("--in", feat_in, "Auctions CSV")->required();
  featurize->add_option("--out", feat_out, "Features CSV")->required();
  featurize->add_option("--length", length, "Series length L")->check(CLI::PositiveNumber);
  featurize->add_flag("--decrements", decrements, "Use per-bid decrements instead of normalized prices");

  // train
  auto* train = app.add_subcommand("train", "Split, cross-validate, fit and evaluate");
  std::string train_data;
  double split = 0.7;
  int folds = 5;
  std::string model_path;
  std::string report_path;
  train->add_option("--data", train_data, "Labeled features CSV")->required();
  train->add_option("--split", split, "Training share of the stratified split");
  train->add_option("--folds", folds, "Cross-validation folds");
  train->add_option("--model", model_path, "Model JSON output")->required();
  train->add_option("--report", report_path, "Report output (.json, otherwise text)");
  add_seed(train);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Confusion table of a model on a labeled features CSV");
  std::string eval_model;
  std::string eval_data;
  std::string eval_report;
  evaluate_cmd->add_option("--model", eval_model, "Model JSON")->required();
  evaluate_cmd->add_option("--data", eval_data, "Labeled features CSV")->required();
  evaluate_cmd->add_option("--report", eval_report, "Report output (.json, otherwise text)");

  // explain
  auto* explain = app.add_subcommand("explain", "Exact Shapley waterfall for one auction");
  std::string exp_model;
  std::string exp_data;
  std::string exp_id;
  std::string exp_out;
  std::string exp_svg;
  std::string exp_background;
  explain->add_option("--model", exp_model, "Model JSON")->required();
  explain->add_option("--data", exp_data, "Features CSV containing the auction")->required();
  explain->add_option("--id", exp_id, "Auction id")->required();
  explain->add_option("--out", exp_out, "Waterfall JSON")->required();
  explain->add_option("--svg", exp_svg, "Optional waterfall chart");
  explain->add_option("--background", exp_background, "Background features CSV (default: --data)");

  // summarize
  auto* summarize = app.add_subcommand("summarize", "Mean |Shapley value| per bid position");
  std::string sum_model;
  std::string sum_data;
  std::string sum_out;
  std::string sum_svg;
  std::string sum_scatter;
  std::string sum_background;
  summarize->add_option("--model", sum_model, "Model JSON")->required();
  summarize->add_option("--data", sum_data, "Features CSV to explain")->required();
  summarize->add_option("--out", sum_out, "Summary CSV")->required();
  summarize->add_option("--svg", sum_svg, "Optional scatter chart");
  summarize->add_option("--scatter", sum_scatter, "Per-point scatter CSV");
  summarize->add_option("--background", sum_background, "Background features CSV (default: --data)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (simulate->parsed()) {
      ExperimentConfig config;
      config.initial_mix = parse_mix(mix_text);
      config.n_auctions = n_auctions;
      config.sample_every = sample_every;
      config.seed = seed;
      config.cost_mode = fixed_costs ? CostMode::FixedPerAgent : CostMode::RedrawPerAuction;
      const auto result = run_experiment(config);
      write_trajectory(std::filesystem::path(sim_out), result);
      if (!sim_svg.empty()) write_text(sim_svg, svg::trajectory_chart(result));
      out << fmt::format("final shares: aggressive {:.2f}, passive {:.2f}, random {:.2f}\n",
                         result.final_share(StrategyType::Aggressive), result.final_share(StrategyType::Passive),
                         result.final_share(StrategyType::Random));
    } else if (generate->parsed()) {
      gen_config.honest.auction.start_price = start_price;
      gen_config.taran.auction.start_price = start_price;
      gen_config.fast_drop.auction.start_price = start_price;
      const auto data = gen_dataset(n_honest, n_cartel, gen_config, seed);
      write_auctions(std::filesystem::path(gen_out), data);
      out << fmt::format("wrote {} auctions ({} honest, {} cartel)\n", data.size(), n_honest, n_cartel);
    } else if (featurize->parsed()) {
      const auto ingested = read_auctions(std::filesystem::path(feat_in));
      for (const auto& w : ingested.warnings) err << "warning: " << w.message << '\n';
      const auto vectors =
          to_features(ingested.series, length, decrements ? FeatureMode::Decrements : FeatureMode::Prices);
      write_features(std::filesystem::path(feat_out), vectors);
      out << fmt::format("wrote {} feature rows ({} warnings)\n", vectors.size(), ingested.warnings.size());
    } else if (train->parsed()) {
      if (!(split > 0.0 && split < 1.0)) {
        throw InvalidArgument(fmt::format("--split must lie strictly between 0 and 1, got {}", split));
      }
      const auto d = load_labeled(train_data);
      CvPlan plan{split, folds, CvPlan::default_grid()};
      const auto result = train_and_evaluate(d.X, d.y, plan, seed);
      save_model(std::filesystem::path(model_path), result.model);
      ReportContext ctx;
      ctx.seed = seed;
      ctx.cv = result.cv;
      for (auto i : result.split.train) ctx.train_ids.push_back(d.rows[i].auction_id);
      for (auto i : result.split.test) ctx.test_ids.push_back(d.rows[i].auction_id);
      if (!report_path.empty()) write_report(std::filesystem::path(report_path), result.test_report, ctx);
      out << format_report(result.test_report);
    } else if (evaluate_cmd->parsed()) {
      const auto model = load_model(std::filesystem::path(eval_model));
      const auto d = load_labeled(eval_data);
      const auto report = kartel::evaluate(model, d.X, d.y);
      if (!eval_report.empty()) write_report(std::filesystem::path(eval_report), report);
      out << format_report(report);
    } else if (explain->parsed()) {
      const auto model = load_model(std::filesystem::path(exp_model));
      const auto rows = read_features(std::filesystem::path(exp_data));
      const auto it = std::find_if(rows.begin(), rows.end(), [&](const FeatureVector& v) { return v.auction_id == exp_id; });
      if (it == rows.end()) throw NotFound(fmt::format("auction '{}' not found in '{}'", exp_id, exp_data));
      const auto background = load_background(exp_background, rows);
      const auto e = exact_shapley(model, *it, background);
      write_text(exp_out, explanation_to_json(e).dump(2) + "\n");
      if (!exp_svg.empty()) write_text(exp_svg, svg::waterfall_chart(e));
      out << fmt::format("auction {}: base {:.4f} -> P(cartel) {:.4f}\n", e.auction_id, e.base_value, e.predicted);
      for (const auto& r : waterfall(e)) {
        if (r.feature) out << fmt::format("  bid {:>2}  {:+.4f}  -> {:.4f}\n", *r.feature + 1, r.phi, r.cumulative);
      }
      out << fmt::format("efficiency |base + sum(phi) - p| = {:.3g} ({})\n", e.efficiency_gap(),
                         e.efficiency_gap() < 1e-9 ? "ok" : "FAILED");
    } else if (summarize->parsed()) {
      const auto model = load_model(std::filesystem::path(sum_model));
      const auto rows = read_features(std::filesystem::path(sum_data));
      const auto background = load_background(sum_background, rows);
      const auto s = global_summary(model, rows, background);
      {
        std::ostringstream csv_out;
        write_summary(csv_out, s);
        write_text(sum_out, csv_out.str());
      }
      if (!sum_scatter.empty()) {
        std::ostringstream scatter;
        write_scatter(scatter, s);
        write_text(sum_scatter, scatter.str());
      }
      if (!sum_svg.empty()) write_text(sum_svg, svg::summary_chart(s));
      for (std::size_t i = 0; i < s.mean_abs_phi.size(); ++i) {
        out << fmt::format("bid {:>2}  mean |phi| {:.4f}\n", i + 1, s.mean_abs_phi[i]);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_data_error() ? kDataError : kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace kartel::cli
