#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tradepipe/error.hpp"
#include "tradepipe/signals.hpp"

namespace tradepipe {
namespace {

using testing::indicator;

TEST(CrossingsTest, SingleBuy) {
    EXPECT_EQ(crossing_points(indicator({1.0, 3.0}), indicator({2.0, 2.0})),
              (std::vector<Crossing>{{1, Side::Buy}}));
}

TEST(CrossingsTest, SingleSell) {
    EXPECT_EQ(crossing_points(indicator({3.0, 1.0}), indicator({2.0, 2.0})),
              (std::vector<Crossing>{{1, Side::Sell}}));
}

TEST(CrossingsTest, TouchThenBreak) {
    EXPECT_EQ(crossing_points(indicator({2.0, 2.0, 3.0}), indicator({2.0, 2.0, 2.0})),
              (std::vector<Crossing>{{2, Side::Buy}}));
}

TEST(CrossingsTest, GapSuppressesCrossing) {
    // Crossing happens across an absent bar, so it is never observed.
    EXPECT_TRUE(crossing_points(indicator({1.0, std::nullopt, 3.0}), indicator({2.0, 2.0, 2.0}))
                    .empty());
}

TEST(CrossingsTest, MisalignedThrows) {
    try {
        crossing_points(indicator({1.0, 2.0}), indicator({1.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MisalignedSeries);
    }
}

TEST(CrossingsTest, SignalsCarryTimestampAndFastValue) {
    const auto sig = crossings(indicator({1.0, 3.0}), indicator({2.0, 2.0}), StrategyKind::VwapCross);
    ASSERT_EQ(sig.size(), 1u);
    EXPECT_EQ(sig[0].timestamp, testing::day(1));
    EXPECT_DOUBLE_EQ(sig[0].trigger_price, 3.0);
    EXPECT_EQ(sig[0].strategy, StrategyKind::VwapCross);
}

std::vector<std::optional<double>> random_values(std::mt19937_64& rng, std::size_t n) {
    // Small integer grid so ties and touches are common.
    std::vector<std::optional<double>> v(n);
    for (auto& x : v) {
        if (rng() % 10 != 0) x = static_cast<double>(rng() % 5);
    }
    return v;
}

TEST(CrossingsTest, MatchesQuadraticReference) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const auto f = random_values(rng, n);
        const auto s = random_values(rng, n);
        ASSERT_EQ(crossing_points(indicator(f), indicator(s)), testing::brute_crossings(f, s));
    }
}

TEST(CrossingsTest, TiesNeverFire) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        auto f = random_values(rng, 50);
        const auto s = random_values(rng, 50);
        for (const auto& c : crossing_points(indicator(f), indicator(s))) {
            auto tied = f;
            tied[c.index] = s[c.index];
            for (const auto& d : crossing_points(indicator(tied), indicator(s))) {
                EXPECT_NE(d.index, c.index);
            }
        }
    }
}

TEST(MaCrossoverTest, F1HasOneGoldenCrossForRisingSegment) {
    // Flat prefix then monotone rise: one Buy, no Sell.
    std::vector<double> closes(10, 100.0);
    for (int i = 1; i <= 20; ++i) closes.push_back(100.0 + i);
    const auto sig = ma_crossover_signals(testing::series_from_closes(closes), 3, 5);
    ASSERT_EQ(sig.size(), 1u);
    EXPECT_EQ(sig[0].side, Side::Buy);
    EXPECT_EQ(sig[0].strategy, StrategyKind::MaCrossover);
    EXPECT_DOUBLE_EQ(sig[0].trigger_price, closes[10]);
}

TEST(MaCrossoverTest, WindowOrder) {
    const auto s = testing::series_from_closes(std::vector<double>(300, 5.0));
    try {
        ma_crossover_signals(s, 200, 50);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WindowOrder);
    }
    EXPECT_THROW(ma_crossover_signals(s, 50, 50), Error);
}

TEST(MaCrossoverTest, ConstantSeriesHasNoSignals) {
    EXPECT_TRUE(ma_crossover_signals(testing::series_from_closes(std::vector<double>(40, 3.3)), 3, 7)
                    .empty());
}

TEST(MaCrossoverTest, PrefixCausality) {
    std::mt19937_64 rng(33);
    const auto closes = testing::random_walk(rng, 300);
    const auto full = ma_crossover_signals(testing::series_from_closes(closes), 5, 20);
    for (std::size_t len : {20u, 100u, 250u}) {
        const auto part =
            ma_crossover_signals(testing::series_from_closes({closes.begin(), closes.begin() + len}), 5, 20);
        ASSERT_LE(part.size(), full.size());
        EXPECT_TRUE(std::equal(part.begin(), part.end(), full.begin()));
        if (part.size() < full.size()) EXPECT_GE(full[part.size()].timestamp, testing::day(len));
    }
}

TEST(VwapCrossTest, OscillationAroundFlatVwap) {
    const auto s = testing::series_from_closes({9, 11, 9, 11, 9});
    const auto flat = indicator({10.0, 10.0, 10.0, 10.0, 10.0}, "VWAP");
    const auto sig = vwap_cross_signals(s, flat);
    ASSERT_EQ(sig.size(), 4u);
    for (std::size_t i = 0; i < sig.size(); ++i) {
        EXPECT_EQ(sig[i].side, i % 2 == 0 ? Side::Buy : Side::Sell);
        EXPECT_EQ(sig[i].strategy, StrategyKind::VwapCross);
    }
    EXPECT_DOUBLE_EQ(sig[0].trigger_price, 11.0);
}

TEST(VwapCrossTest, AlwaysAboveHasNoSignals) {
    EXPECT_TRUE(vwap_cross_signals(testing::series_from_closes({11, 12, 13}),
                                   indicator({10.0, 10.0, 10.0}))
                    .empty());
}

TEST(VwapCrossTest, EqualThenBreakout) {
    const auto sig = vwap_cross_signals(testing::series_from_closes({10, 10, 10, 12}),
                                        indicator({10.0, 10.0, 10.0, 10.0}));
    ASSERT_EQ(sig.size(), 1u);
    EXPECT_EQ(sig[0].side, Side::Buy);
    EXPECT_EQ(sig[0].timestamp, testing::day(3));
}

TEST(StrategyTest, Parsing) {
    EXPECT_EQ(parse_strategy("ma"), StrategyKind::MaCrossover);
    EXPECT_EQ(parse_strategy("vwap"), StrategyKind::VwapCross);
    EXPECT_EQ(parse_strategy("buyhold"), StrategyKind::BuyHold);
    EXPECT_THROW(parse_strategy("momentum"), Error);
    EXPECT_EQ(parse_side(to_string(Side::Sell)), Side::Sell);
}

}  // namespace
}  // namespace tradepipe
