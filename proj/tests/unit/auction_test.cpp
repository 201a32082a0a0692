#include "kartel/auction.hpp"

#include <gtest/gtest.h>

#include <random>

#include "kartel/errors.hpp"

namespace kartel {
namespace {

TEST(LegalBounds, ScalesWithStartPrice) {
  AuctionConfig c;
  c.start_price = 100.0;
  auto b = legal_decrement_bounds(c, 100.0);
  EXPECT_NEAR(b.lo, 95.0, 1e-12);
  EXPECT_NEAR(b.hi, 99.5, 1e-12);
}

TEST(LegalBounds, UnitStart) {
  auto b = legal_decrement_bounds(AuctionConfig{}, 1.0);
  EXPECT_NEAR(b.lo, 0.95, 1e-12);
  EXPECT_NEAR(b.hi, 0.995, 1e-12);
}

TEST(LegalBounds, LowerEndFlooredAtZero) {
  auto b = legal_decrement_bounds(AuctionConfig{}, 0.03);
  EXPECT_EQ(b.lo, 0.0);
  EXPECT_NEAR(b.hi, 0.025, 1e-12);
}

TEST(LegalBounds, DecrementsMeasuredFromStartNotCurrent) {
  AuctionConfig c;
  c.start_price = 100.0;
  auto b = legal_decrement_bounds(c, 50.0);
  EXPECT_NEAR(b.lo, 45.0, 1e-12);
  EXPECT_NEAR(b.hi, 49.5, 1e-12);
}

TEST(LegalBounds, RejectsNonPositivePrice) {
  EXPECT_THROW(legal_decrement_bounds(AuctionConfig{}, 0.0), InvalidArgument);
}

TEST(AuctionConfig, Validate) {
  AuctionConfig c;
  EXPECT_NO_THROW(c.validate());
  c.min_decrement_frac = 0.1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.start_price = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Label, ParseAndPrint) {
  EXPECT_EQ(parse_label("honest"), Label::Honest);
  EXPECT_EQ(parse_label("1"), Label::Cartel);
  EXPECT_EQ(parse_label("bogus"), std::nullopt);
  EXPECT_EQ(to_string(Label::Cartel), "cartel");
}

TEST(RunAuction, PassiveBiddersLowCostWins) {
  std::array<Bidder, 2> b{Bidder{0.60, DecrementPolicy::passive()}, Bidder{0.70, DecrementPolicy::passive()}};
  for (int first : {0, 1}) {
    std::mt19937_64 rng(1);
    auto r = run_auction(AuctionConfig{}, b, first, rng);
    ASSERT_TRUE(r.outcome.winner_id.has_value());
    EXPECT_EQ(*r.outcome.winner_id, 0);
    EXPECT_GE(r.outcome.final_price, 0.695 - 1e-12);
    EXPECT_LE(r.outcome.final_price, 0.70 + 1e-12);
    EXPECT_NEAR(r.outcome.winner_profit, r.outcome.final_price - 0.60, 1e-15);
    for (double d : r.series.decrement_fractions()) EXPECT_NEAR(d, 0.005, 1e-12);
  }
}

TEST(RunAuction, PassiveBeatsAggressiveOnWorkedExample) {
  std::mt19937_64 rng(1);
  std::array<Bidder, 2> passive{Bidder{0.60, DecrementPolicy::passive()}, Bidder{0.70, DecrementPolicy::passive()}};
  std::array<Bidder, 2> aggressive{Bidder{0.60, DecrementPolicy::aggressive()},
                                   Bidder{0.70, DecrementPolicy::passive()}};
  auto p = run_auction(AuctionConfig{}, passive, 0, rng);
  auto a = run_auction(AuctionConfig{}, aggressive, 0, rng);
  ASSERT_EQ(a.outcome.winner_id, std::optional<int>(0));
  EXPECT_GT(p.outcome.winner_profit, a.outcome.winner_profit);
}

TEST(RunAuction, NobodyCanBid) {
  std::array<Bidder, 2> b{Bidder{1.0, DecrementPolicy::passive()}, Bidder{1.0, DecrementPolicy::passive()}};
  std::mt19937_64 rng(3);
  auto r = run_auction(AuctionConfig{}, b, 0, rng);
  EXPECT_FALSE(r.outcome.winner_id.has_value());
  EXPECT_EQ(r.outcome.n_bids, 0);
  EXPECT_TRUE(r.series.bids.empty());
}

TEST(RunAuction, ZeroCostAggressiveReachesZero) {
  std::array<Bidder, 2> b{Bidder{0.0, DecrementPolicy::aggressive()}, Bidder{0.0, DecrementPolicy::aggressive()}};
  std::mt19937_64 rng(3);
  auto r = run_auction(AuctionConfig{}, b, 0, rng);
  EXPECT_EQ(r.outcome.n_bids, 20);
  EXPECT_EQ(r.outcome.final_price, 0.0);
  EXPECT_EQ(r.outcome.winner_id, std::optional<int>(1));
  EXPECT_EQ(r.series.bids.back().bidder_id, 1);
}

TEST(RunAuction, ExceedingMaxBidsThrows) {
  AuctionConfig c;
  c.max_bids = 5;
  std::array<Bidder, 2> b{Bidder{0.0, DecrementPolicy::passive()}, Bidder{0.0, DecrementPolicy::passive()}};
  std::mt19937_64 rng(3);
  EXPECT_THROW(run_auction(c, b, 0, rng), ExceededMaxBids);
}

TEST(RunAuction, PolicyOutsideBoundsRejected) {
  std::array<Bidder, 2> b{Bidder{0.0, DecrementPolicy::fixed(0.2)}, Bidder{0.0, DecrementPolicy::passive()}};
  std::mt19937_64 rng(3);
  EXPECT_THROW(run_auction(AuctionConfig{}, b, 0, rng), InvalidArgument);
}

TEST(RunAuction, SameSeedSameSeries) {
  std::array<Bidder, 2> b{Bidder{0.2, DecrementPolicy::random()}, Bidder{0.3, DecrementPolicy::random()}};
  auto x = run_auction(AuctionConfig{}, b, std::uint64_t{99});
  auto y = run_auction(AuctionConfig{}, b, std::uint64_t{99});
  ASSERT_EQ(x.series.bids.size(), y.series.bids.size());
  for (std::size_t i = 0; i < x.series.bids.size(); ++i) {
    EXPECT_EQ(x.series.bids[i].price, y.series.bids[i].price);
    EXPECT_EQ(x.series.bids[i].bidder_id, y.series.bids[i].bidder_id);
  }
}

TEST(RunAuction, PlayMatchesRun) {
  std::array<Bidder, 2> b{Bidder{0.1, DecrementPolicy::random()}, Bidder{0.4, DecrementPolicy::aggressive()}};
  std::mt19937_64 r1(5);
  std::mt19937_64 r2(5);
  auto full = run_auction(AuctionConfig{}, b, 1, r1);
  auto fast = play_auction(AuctionConfig{}, b, 1, r2);
  EXPECT_EQ(full.outcome.winner_id, fast.winner_id);
  EXPECT_EQ(full.outcome.final_price, fast.final_price);
  EXPECT_EQ(full.outcome.n_bids, fast.n_bids);
}

TEST(RunAuctionProperty, EveryBidIsLegalAndWinnerCoversCost) {
  AuctionConfig c;
  std::mt19937_64 draw(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DecrementPolicy policies[] = {DecrementPolicy::passive(), DecrementPolicy::aggressive(),
                                      DecrementPolicy::random(), DecrementPolicy::fixed(0.013)};
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<Bidder, 2> b{Bidder{u(draw), policies[trial % 4]}, Bidder{u(draw), policies[(trial / 4) % 4]}};
    std::mt19937_64 rng(static_cast<std::uint64_t>(trial));
    auto r = run_auction(c, b, trial % 2, rng);
    double current = c.start_price;
    for (const auto& bid : r.series.bids) {
      EXPECT_TRUE(legal_decrement_bounds(c, current).contains(bid.price));
      EXPECT_GE(bid.price, b[static_cast<std::size_t>(bid.bidder_id)].cost - kPriceTolerance);
      current = bid.price;
    }
    EXPECT_TRUE(r.series.strictly_decreasing());
    if (r.outcome.winner_id) {
      EXPECT_GE(r.outcome.final_price, b[static_cast<std::size_t>(*r.outcome.winner_id)].cost - kPriceTolerance);
    }
  }
}

TEST(BidSeries, NormalizedAndDecrements) {
  BidSeries s;
  s.start_price = 200.0;
  s.bids = {{0, 190.0, 0}, {1, 189.0, 1}};
  auto p = s.normalized_prices();
  auto d = s.decrement_fractions();
  EXPECT_DOUBLE_EQ(p[0], 0.95);
  EXPECT_DOUBLE_EQ(p[1], 0.945);
  EXPECT_DOUBLE_EQ(d[0], 0.05);
  EXPECT_DOUBLE_EQ(d[1], 0.005);
}

}  // namespace
}  // namespace kartel
