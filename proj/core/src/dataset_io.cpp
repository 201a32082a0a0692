#include "kartel/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>

#include "kartel/csv.hpp"
#include "kartel/errors.hpp"

namespace kartel {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound(fmt::format("cannot open '{}' for reading", path.string()));
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

const std::vector<std::string> kAuctionHeader{"auction_id", "start_price", "bid_index", "bidder_id", "price", "label"};

struct AuctionRow {
  long line = 0;
  std::string auction_id;
  std::int64_t start_cents = 0;
  long bid_index = 0;
  std::string bidder;
  std::int64_t price_cents = 0;
  std::optional<Label> label;
};

}  // namespace

IngestResult read_auctions(std::istream& in, const AuctionConfig& bounds) {
  bounds.validate();
  IngestResult result;
  long line_no = 0;
  auto header = csv::next_row(in, line_no);
  if (!header) return result;

  const bool has_label = header->size() == kAuctionHeader.size();
  const std::vector<std::string> expected(kAuctionHeader.begin(), kAuctionHeader.end() - (has_label ? 0 : 1));
  if (*header != expected) {
    throw ParseError(fmt::format("line {}: expected header '{}'", line_no, csv::join(kAuctionHeader)));
  }

  std::map<std::string, std::vector<AuctionRow>> by_auction;
  while (auto fields = csv::next_row(in, line_no)) {
    if (fields->size() != expected.size()) {
      throw ParseError(fmt::format("line {}: expected {} fields, got {}", line_no, expected.size(), fields->size()));
    }
    AuctionRow row;
    row.line = line_no;
    try {
      row.auction_id = (*fields)[0];
      row.start_cents = csv::parse_cents((*fields)[1]);
      row.bid_index = csv::parse_long((*fields)[2]);
      row.bidder = (*fields)[3];
      row.price_cents = csv::parse_cents((*fields)[4]);
      if (has_label && !(*fields)[5].empty()) {
        row.label = parse_label((*fields)[5]);
        if (!row.label) throw ParseError(fmt::format("unknown label '{}'", (*fields)[5]));
      }
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
    }
    if (row.auction_id.empty()) throw ParseError(fmt::format("line {}: empty auction_id", line_no));
    if (row.bidder.empty()) throw ParseError(fmt::format("line {}: empty bidder_id", line_no));
    if (row.start_cents <= 0) throw ParseError(fmt::format("line {}: start_price must be positive", line_no));
    if (row.price_cents < 0) throw ParseError(fmt::format("line {}: negative price", line_no));
    if (row.bid_index < 0) throw ParseError(fmt::format("line {}: negative bid_index", line_no));
    by_auction[row.auction_id].push_back(std::move(row));
  }

  for (auto& [id, rows] : by_auction) {
    std::sort(rows.begin(), rows.end(),
              [](const AuctionRow& a, const AuctionRow& b) { return a.bid_index < b.bid_index; });
    const auto& first = rows.front();
    BidSeries s;
    s.auction_id = id;
    s.start_price = static_cast<double>(first.start_cents) / 100.0;
    s.label = first.label;
    s.source = SeriesSource::Ingested;

    const double start = static_cast<double>(first.start_cents);
    // Platforms quote steps in whole kopecks; allow half a kopeck of rounding.
    const double lo = bounds.min_decrement_frac * start - 0.5;
    const double hi = bounds.max_decrement_frac * start + 0.5;
    std::map<std::string, int> bidder_ids;
    std::int64_t prev = first.start_cents;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      if (r.bid_index != static_cast<long>(k)) {
        throw ParseError(fmt::format("auction '{}': bid_index {} at line {} breaks the contiguous sequence from 0",
                                     id, r.bid_index, r.line));
      }
      if (r.start_cents != first.start_cents) {
        throw ParseError(fmt::format("auction '{}': inconsistent start_price at line {}", id, r.line));
      }
      if (r.label != first.label) {
        throw ParseError(fmt::format("auction '{}': inconsistent label at line {}", id, r.line));
      }
      if (r.price_cents >= prev) {
        throw NonMonotonePrices(fmt::format("auction '{}': bid {} at {} does not undercut {}", id, k,
                                            csv::format_cents(r.price_cents), csv::format_cents(prev)));
      }
      const auto step = static_cast<double>(prev - r.price_cents);
      if (step < lo || step > hi) {
        const double frac = step / start;
        result.warnings.push_back(
            {id, static_cast<int>(k), frac,
             fmt::format("auction '{}' bid {}: decrement {:.4f}% of start outside [{}%, {}%]", id, k, frac * 100.0,
                         bounds.min_decrement_frac * 100.0, bounds.max_decrement_frac * 100.0)});
      }
      auto [it, inserted] = bidder_ids.try_emplace(r.bidder, static_cast<int>(bidder_ids.size()));
      if (inserted) s.bidder_names.push_back(r.bidder);
      s.bids.push_back(Bid{it->second, static_cast<double>(r.price_cents) / 100.0, static_cast<int>(k)});
      prev = r.price_cents;
    }
    result.series.push_back(std::move(s));
  }
  return result;
}

IngestResult read_auctions(const std::filesystem::path& path, const AuctionConfig& bounds) {
  auto in = open_in(path);
  return read_auctions(in, bounds);
}

void write_auctions(std::ostream& out, std::span<const BidSeries> series) {
  out << csv::join(kAuctionHeader) << '\n';
  for (const auto& s : series) {
    const auto start = csv::format_cents(std::llround(s.start_price * 100.0));
    const std::string label = s.label ? to_string(*s.label) : "";
    for (const auto& b : s.bids) {
      out << csv::join({s.auction_id, start, std::to_string(b.index), s.bidder_name(b.bidder_id),
                        csv::format_cents(std::llround(b.price * 100.0)), label})
          << '\n';
    }
  }
}

void write_auctions(const std::filesystem::path& path, std::span<const BidSeries> series) {
  auto out = open_out(path);
  write_auctions(out, series);
}

void write_features(std::ostream& out, std::span<const FeatureVector> vectors) {
  const std::size_t L = vectors.empty() ? static_cast<std::size_t>(kDefaultSeriesLength) : vectors.front().values.size();
  std::vector<std::string> header{"auction_id"};
  for (std::size_t i = 1; i <= L; ++i) header.push_back(fmt::format("f{}", i));
  header.push_back("label");
  out << csv::join(header) << '\n';
  for (const auto& v : vectors) {
    if (v.values.size() != L) throw DimensionMismatch(fmt::format("row '{}' has {} features, expected {}", v.auction_id, v.values.size(), L));
    std::vector<std::string> row{v.auction_id};
    for (double x : v.values) row.push_back(fmt::format("{}", x));
    row.push_back(v.label ? (*v.label == Label::Cartel ? "1" : "0") : "");
    out << csv::join(row) << '\n';
  }
}

void write_features(const std::filesystem::path& path, std::span<const FeatureVector> vectors) {
  auto out = open_out(path);
  write_features(out, vectors);
}

std::vector<FeatureVector> read_features(std::istream& in) {
  std::vector<FeatureVector> out;
  long line_no = 0;
  auto header = csv::next_row(in, line_no);
  if (!header) return out;
  const auto& h = *header;
  if (h.size() < 3 || h.front() != "auction_id" || h.back() != "label") {
    throw ParseError("features header must be auction_id,f1,...,fL,label");
  }
  const std::size_t L = h.size() - 2;
  for (std::size_t i = 1; i <= L; ++i) {
    if (h[i] != fmt::format("f{}", i)) throw ParseError(fmt::format("features header column {} should be f{}", i + 1, i));
  }
  while (auto fields = csv::next_row(in, line_no)) {
    if (fields->size() != h.size()) {
      throw ParseError(fmt::format("line {}: expected {} fields, got {}", line_no, h.size(), fields->size()));
    }
    FeatureVector v;
    v.auction_id = fields->front();
    try {
      for (std::size_t i = 1; i <= L; ++i) v.values.push_back(csv::parse_double((*fields)[i]));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
    }
    const auto& label = fields->back();
    if (!label.empty()) {
      v.label = parse_label(label);
      if (!v.label) throw ParseError(fmt::format("line {}: unknown label '{}'", line_no, label));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<FeatureVector> read_features(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_features(in);
}

namespace {

json tree_node_to_json(const Tree& tree, std::size_t i) {
  const auto& n = tree.nodes[i];
  if (n.is_leaf()) return json{{"leaf", n.value}};
  return json{{"feature", n.feature},
              {"threshold", n.threshold},
              {"left", tree_node_to_json(tree, static_cast<std::size_t>(n.left))},
              {"right", tree_node_to_json(tree, static_cast<std::size_t>(n.right))}};
}

int tree_node_from_json(const json& j, int n_features, Tree& tree, int depth) {
  if (depth > 64) throw ParseError("tree nesting too deep");
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    tree.nodes[static_cast<std::size_t>(id)].value = j.at("leaf").get<double>();
    return id;
  }
  const int feature = j.at("feature").get<int>();
  if (feature < 0 || feature >= n_features) throw ParseError(fmt::format("split feature {} out of range", feature));
  const double threshold = j.at("threshold").get<double>();
  const int l = tree_node_from_json(j.at("left"), n_features, tree, depth + 1);
  const int r = tree_node_from_json(j.at("right"), n_features, tree, depth + 1);
  auto& node = tree.nodes[static_cast<std::size_t>(id)];
  node.feature = feature;
  node.threshold = threshold;
  node.left = l;
  node.right = r;
  return id;
}

json hyperparams_to_json(const Hyperparams& p) {
  return json{{"n_trees", p.n_trees},
              {"max_depth", p.max_depth},
              {"learning_rate", p.learning_rate},
              {"min_samples_leaf", p.min_samples_leaf},
              {"lambda", p.lambda}};
}

Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams p;
  p.n_trees = j.at("n_trees").get<int>();
  p.max_depth = j.at("max_depth").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  p.lambda = j.at("lambda").get<double>();
  return p;
}

}  // namespace

nlohmann::json model_to_json(const GbdtModel& model) {
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(tree_node_to_json(t, 0));
  return json{{"format", "kartel-gbdt"},
              {"version", kModelFormatVersion},
              {"n_features", model.n_features},
              {"base_score", model.base_score},
              {"learning_rate", model.learning_rate},
              {"hyperparams", hyperparams_to_json(model.hyperparams)},
              {"trees", std::move(trees)}};
}

GbdtModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", std::string{}) != "kartel-gbdt") {
    throw SchemaVersionMismatch("document is not a kartel-gbdt model");
  }
  const int version = doc.value("version", -1);
  if (version != kModelFormatVersion) {
    throw SchemaVersionMismatch(fmt::format("model format version {} is not supported (expected {})", version,
                                            kModelFormatVersion));
  }
  try {
    GbdtModel m;
    m.n_features = doc.at("n_features").get<int>();
    if (m.n_features <= 0) throw ParseError("n_features must be positive");
    m.base_score = doc.at("base_score").get<double>();
    m.learning_rate = doc.at("learning_rate").get<double>();
    m.hyperparams = hyperparams_from_json(doc.at("hyperparams"));
    for (const auto& jt : doc.at("trees")) {
      Tree t;
      tree_node_from_json(jt, m.n_features, t, 0);
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed model document: {}", e.what()));
  }
}

void save_model(const std::filesystem::path& path, const GbdtModel& model) {
  auto out = open_out(path);
  out << model_to_json(model).dump(2) << '\n';
}

GbdtModel load_model(const std::filesystem::path& path) {
  auto in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return model_from_json(doc);
}

std::string format_report(const EvalReport& r) {
  auto pct = [](double f) { return fmt::format("{}%", std::lround(f * 100.0)); };
  std::string out;
  out += fmt::format("{:<12}{:>20}\n", "True class", "Predicted class");
  out += fmt::format("{:<12}{:>10}{:>10}\n", "", "Honest", "Cartel");
  out += fmt::format("{:<12}{:>10}{:>10}\n", "Honest", pct(r.honest_honest), pct(r.honest_cartel));
  out += fmt::format("{:<12}{:>10}{:>10}\n", "Cartel", pct(r.cartel_honest), pct(r.cartel_cartel));
  out += fmt::format("Accuracy: {}", pct(r.accuracy));
  if (r.n > 0) out += fmt::format(" ({} auctions)", r.n);
  out += '\n';
  return out;
}

nlohmann::json report_to_json(const EvalReport& r, const ReportContext& context) {
  json doc{{"format", "kartel-report"},
           {"version", kReportFormatVersion},
           {"n_test", r.n},
           {"confusion",
            {{"honest", {{"honest", r.honest_honest}, {"cartel", r.honest_cartel}}},
             {"cartel", {{"honest", r.cartel_honest}, {"cartel", r.cartel_cartel}}}}},
           {"accuracy", r.accuracy},
           {"table", format_report(r)}};
  if (context.seed) doc["seed"] = *context.seed;
  if (context.cv) {
    json candidates = json::array();
    for (const auto& c : context.cv->candidates) {
      candidates.push_back({{"hyperparams", hyperparams_to_json(c.params)},
                            {"fold_scores", c.fold_scores},
                            {"mean_accuracy", c.mean_accuracy}});
    }
    doc["cv"] = {{"best", hyperparams_to_json(context.cv->best)},
                 {"best_mean_accuracy", context.cv->best_mean_accuracy},
                 {"candidates", std::move(candidates)}};
  }
  if (!context.train_ids.empty() || !context.test_ids.empty()) {
    doc["split"] = {{"train", context.train_ids}, {"test", context.test_ids}};
  }
  return doc;
}

void write_report(const std::filesystem::path& path, const EvalReport& report, const ReportContext& context) {
  auto out = open_out(path);
  if (path.extension() == ".json") {
    out << report_to_json(report, context).dump(2) << '\n';
  } else {
    out << format_report(report);
  }
}

void write_trajectory(std::ostream& out, const SimulationRun& run) {
  out << "auction_index,share_aggressive,share_passive,share_random\n";
  for (const auto& p : run.trajectory) {
    out << fmt::format("{},{},{},{}\n", p.auction_index, p.shares[0], p.shares[1], p.shares[2]);
  }
}

void write_trajectory(const std::filesystem::path& path, const SimulationRun& run) {
  auto out = open_out(path);
  write_trajectory(out, run);
}

nlohmann::json explanation_to_json(const ShapleyExplanation& e) {
  json rows = json::array();
  for (const auto& r : waterfall(e)) {
    rows.push_back({{"bid_index", r.feature ? json(*r.feature + 1) : json(nullptr)},
                    {"phi", r.phi},
                    {"cumulative", r.cumulative}});
  }
  return json{{"auction_id", e.auction_id},
              {"base_value", e.base_value},
              {"phis", e.phis},
              {"predicted", e.predicted},
              {"efficiency_gap", e.efficiency_gap()},
              {"waterfall", std::move(rows)}};
}

void write_summary(std::ostream& out, const GlobalSummary& summary) {
  out << "bid_index,mean_abs_phi\n";
  for (std::size_t i = 0; i < summary.mean_abs_phi.size(); ++i) {
    out << fmt::format("{},{}\n", i + 1, summary.mean_abs_phi[i]);
  }
}

void write_scatter(std::ostream& out, const GlobalSummary& summary) {
  out << "auction_id,bid_index,phi,value\n";
  for (const auto& p : summary.scatter) {
    out << csv::escape(p.auction_id) << fmt::format(",{},{},{}\n", p.feature + 1, p.phi, p.value);
  }
}

}  // namespace kartel
