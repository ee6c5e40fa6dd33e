#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "tradepipe/error.hpp"
#include "tradepipe/indicators.hpp"

namespace tradepipe {
namespace {

using testing::series_from_closes;

std::vector<std::optional<double>> values(const IndicatorSeries& s) {
    std::vector<std::optional<double>> out;
    for (const auto& p : s.points) out.push_back(p.value);
    return out;
}

using Opt = std::vector<std::optional<double>>;

TEST(SmaTest, ConstantSeries) {
    const auto s = sma(series_from_closes({7.3, 7.3, 7.3, 7.3}), 2);
    EXPECT_EQ(s.name, "SMA_2");
    EXPECT_EQ(values(s), (Opt{std::nullopt, 7.3, 7.3, 7.3}));
}

TEST(SmaTest, HandExample) {
    EXPECT_EQ(values(sma(series_from_closes({1, 2, 3, 4, 5}), 3)),
              (Opt{std::nullopt, std::nullopt, 2.0, 3.0, 4.0}));
}

TEST(SmaTest, FullWindowIsMeanOfAllCloses) {
    const auto v = values(sma(series_from_closes({2, 4, 9}), 3));
    EXPECT_FALSE(v[0]);
    EXPECT_FALSE(v[1]);
    EXPECT_DOUBLE_EQ(*v[2], 5.0);
}

TEST(SmaTest, WindowErrors) {
    const auto s = series_from_closes({1, 2, 3});
    try {
        sma(s, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WindowZero);
    }
    try {
        sma(s, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WindowTooLarge);
    }
}

TEST(SmaTest, MatchesBruteForceOnRandomSeries) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto closes = testing::random_walk(rng, 1 + rng() % 300);
        const std::size_t n = 1 + rng() % std::min<std::size_t>(closes.size(), 60);
        const auto got = values(sma(series_from_closes(closes), n));
        const auto want = testing::brute_sma(closes, n);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t t = 0; t < got.size(); ++t) {
            ASSERT_EQ(got[t].has_value(), t + 1 >= n);
            ASSERT_EQ(got[t].has_value(), want[t].has_value());
            if (got[t]) ASSERT_TRUE(testing::close_rel(*got[t], *want[t], 1e-12));
        }
    }
}

TEST(SmaTest, ShiftAndScaleEquivariant) {
    std::mt19937_64 rng(12);
    const auto closes = testing::random_walk(rng, 120);
    std::vector<double> shifted;
    std::vector<double> scaled;
    for (double c : closes) {
        shifted.push_back(c + 37.5);
        scaled.push_back(c * 3.0);
    }
    const auto base = values(sma(series_from_closes(closes), 9));
    const auto sh = values(sma(series_from_closes(shifted), 9));
    const auto sc = values(sma(series_from_closes(scaled), 9));
    for (std::size_t t = 8; t < base.size(); ++t) {
        EXPECT_TRUE(testing::close_rel(*sh[t], *base[t] + 37.5, 1e-12));
        EXPECT_TRUE(testing::close_rel(*sc[t], *base[t] * 3.0, 1e-12));
    }
}

TEST(SmaTest, PrefixCausality) {
    std::mt19937_64 rng(13);
    const auto closes = testing::random_walk(rng, 100);
    const auto full = sma(series_from_closes(closes), 10);
    for (std::size_t len : {10u, 37u, 99u}) {
        const auto prefix = sma(series_from_closes({closes.begin(), closes.begin() + len}), 10);
        EXPECT_TRUE(std::equal(prefix.points.begin(), prefix.points.end(), full.points.begin()));
    }
}

TEST(VwapTest, SingleBar) {
    EXPECT_EQ(values(vwap(series_from_closes({10}, {100}))), (Opt{10.0}));
}

TEST(VwapTest, CumulativeHandExample) {
    const auto v = vwap(series_from_closes({10, 12}, {100, 300}), {SessionMode::Cumulative});
    EXPECT_EQ(v.name, "VWAP");
    EXPECT_EQ(values(v), (Opt{10.0, 11.5}));
}

TEST(VwapTest, DailyResetRestartsAtUtcMidnight) {
    // Six-hour bars: four per UTC day.
    const auto s = series_from_closes({10, 11, 12, 13, 20, 21, 22, 23}, {1, 2, 3, 4, 5, 6, 7, 8},
                                      std::chrono::hours{6});
    const auto daily = values(vwap(s));
    EXPECT_DOUBLE_EQ(*daily[4], 20.0);
    const auto cumulative = values(vwap(s, {SessionMode::Cumulative}));
    EXPECT_GT(*daily[4], *cumulative[4]);
    EXPECT_EQ(daily[3], cumulative[3]);
}

TEST(VwapTest, AbsentUntilVolumeTrades) {
    const auto v = values(vwap(series_from_closes({10, 11, 12}, {0, 0, 5})));
    EXPECT_EQ(v, (Opt{std::nullopt, std::nullopt, 12.0}));
}

TEST(VwapTest, EqualVolumesGiveRunningMean) {
    std::mt19937_64 rng(21);
    const auto closes = testing::random_walk(rng, 200);
    const auto v = values(vwap(series_from_closes(closes, std::vector<double>(200, 42.0)),
                               {SessionMode::Cumulative}));
    long double sum = 0;
    for (std::size_t t = 0; t < closes.size(); ++t) {
        sum += closes[t];
        EXPECT_TRUE(testing::close_rel(*v[t], static_cast<double>(sum / (t + 1)), 1e-12));
    }
}

TEST(VwapTest, SessionModeParsing) {
    EXPECT_EQ(parse_session_mode("daily"), SessionMode::DailyReset);
    EXPECT_EQ(parse_session_mode("cumulative"), SessionMode::Cumulative);
    EXPECT_THROW(parse_session_mode("weekly"), Error);
}

TEST(AlignTest, ReindexesOntoSeries) {
    const auto s = series_from_closes({1, 2, 3});
    IndicatorSeries ind{"VWAP", {{testing::day(1), 5.0}, {testing::day(2), 6.0}, {testing::day(9), 7.0}}};
    const auto a = align_to(s, ind);
    EXPECT_TRUE(aligned(s, a));
    EXPECT_EQ(values(a), (Opt{std::nullopt, 5.0, 6.0}));
    EXPECT_FALSE(aligned(s, ind));
}

}  // namespace
}  // namespace tradepipe
