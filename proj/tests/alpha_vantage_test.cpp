#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "stub_server.hpp"
#include "test_support.hpp"
#include "tradepipe/alpha_vantage.hpp"
#include "tradepipe/error.hpp"

namespace tradepipe {
namespace {

using namespace std::chrono;
using testing::fixture;
using testing::StubAlphaVantage;

/// Settable clock shared between the test and the client.
struct ManualClock {
    std::shared_ptr<system_clock::time_point> now =
        std::make_shared<system_clock::time_point>(sys_days{2024y / March / 4} + hours{10});
    Clock fn() const {
        return [p = now] { return *p; };
    }
    void advance(system_clock::duration d) const { *now += d; }
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

PriceSeries expected(const std::string& name, const std::string& symbol, AssetClass asset,
                     Interval interval) {
    return load_csv(fixture("av/" + name), asset, interval, symbol);
}

class ClientTest : public ::testing::Test {
protected:
    AlphaVantageClient client(const std::string& name, FetchPolicy policy = {}) {
        policy.cache_dir = testing::scratch_dir(name);
        ClientOptions opts;
        opts.api_base = stub.base_url();
        opts.api_key = "demo";
        return AlphaVantageClient(policy, opts, clock.fn());
    }

    template <typename F>
    static ErrorCode code_of(F&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        ADD_FAILURE() << "no error";
        return ErrorCode::InvalidArgument;
    }

    StubAlphaVantage stub;
    ManualClock clock;
};

TEST_F(ClientTest, FetchDailyMatchesFixture) {
    auto c = client("daily");
    EXPECT_EQ(c.fetch_daily("AAPL", AssetClass::Stock),
              expected("daily_AAPL_expected.csv", "AAPL", AssetClass::Stock, kDaily));
    EXPECT_EQ(stub.last_param("function"), "TIME_SERIES_DAILY");
    EXPECT_EQ(stub.last_param("apikey"), "demo");
}

TEST_F(ClientTest, CacheHitIssuesNoRequest) {
    auto c = client("cache_hit");
    const auto first = c.fetch_daily("AAPL", AssetClass::Stock);
    EXPECT_EQ(stub.requests(), 1);
    clock.advance(hours{1});
    EXPECT_EQ(c.fetch_daily("AAPL", AssetClass::Stock), first);
    EXPECT_EQ(stub.requests(), 1);
    EXPECT_EQ(c.requests_issued(), 1u);
}

TEST_F(ClientTest, SixthCallInAMinuteIsRateLimited) {
    auto c = client("rate");
    // Distinct symbols defeat the cache; the stub answers unknown symbols
    // with an error document, which still costs a request.
    for (const char* s : {"A1", "A2", "A3", "A4", "A5"}) {
        EXPECT_EQ(code_of([&] { c.fetch_daily(s, AssetClass::Stock); }), ErrorCode::ApiError);
        clock.advance(seconds{5});
    }
    EXPECT_EQ(code_of([&] { c.fetch_daily("A6", AssetClass::Stock); }),
              ErrorCode::RateLimitExceeded);
    EXPECT_EQ(stub.requests(), 5);
    clock.advance(seconds{40});
    EXPECT_NO_THROW(c.fetch_daily("AAPL", AssetClass::Stock));
}

TEST_F(ClientTest, CryptoIntradayMatchesFixture) {
    auto c = client("eth");
    EXPECT_EQ(c.fetch_intraday("ETH", AssetClass::Crypto, kFiveMinutes),
              expected("crypto_intraday_ETH_5min_expected.csv", "ETH", AssetClass::Crypto,
                       kFiveMinutes));
    EXPECT_EQ(stub.last_param("function"), "CRYPTO_INTRADAY");
    EXPECT_EQ(stub.last_param("interval"), "5min");
    EXPECT_EQ(stub.last_param("market"), "USD");
}

TEST_F(ClientTest, StockIntradayConvertsEasternToUtc) {
    auto c = client("aapl_intraday");
    EXPECT_EQ(c.fetch_intraday("AAPL", AssetClass::Stock),
              expected("intraday_AAPL_5min_expected.csv", "AAPL", AssetClass::Stock,
                       kFiveMinutes));
}

TEST_F(ClientTest, UnsupportedIntervalSurfacesApiErrorVerbatim) {
    auto c = client("bad_interval");
    try {
        c.fetch_intraday("ETH", AssetClass::Crypto, minutes{7});
        FAIL();
    } catch (const ApiError& e) {
        EXPECT_EQ(e.status(), 200);
        EXPECT_EQ(e.body_excerpt(),
                  "Invalid API call. Please retry or visit the documentation "
                  "(https://www.alphavantage.co/documentation/) for TIME_SERIES_INTRADAY.");
    }
}

TEST_F(ClientTest, EmptySeries) {
    auto c = client("empty");
    EXPECT_EQ(code_of([&] { c.fetch_intraday("NOTRADE", AssetClass::Stock); }),
              ErrorCode::EmptySeries);
}

TEST_F(ClientTest, HttpStatusIsReported) {
    auto c = client("http500");
    try {
        c.fetch_daily("HTTP500", AssetClass::Stock);
        FAIL();
    } catch (const ApiError& e) {
        EXPECT_EQ(e.status(), 500);
        EXPECT_EQ(e.body_excerpt(), "upstream exploded");
    }
}

TEST_F(ClientTest, VwapMatchesFixture) {
    auto c = client("vwap");
    const auto v = c.fetch_vwap_stock("TSLA");
    const auto want = indicator_from_csv(read_file(fixture("av/vwap_TSLA_5min_expected.csv")));
    EXPECT_EQ(v, want);
    EXPECT_EQ(v.name, "VWAP");
    EXPECT_EQ(c.fetch_vwap_stock("TSLA"), v);
    EXPECT_EQ(stub.requests(), 1);
}

TEST_F(ClientTest, VwapRejectsCrypto) {
    auto c = client("vwap_btc");
    EXPECT_EQ(code_of([&] { c.fetch_vwap_stock("BTC"); }), ErrorCode::UnsupportedAsset);
    EXPECT_EQ(stub.requests(), 0);
}

TEST_F(ClientTest, StaleCacheWithExhaustedBudgetLeavesCacheUntouched) {
    FetchPolicy policy;
    policy.max_requests_per_day = 1;
    auto c = client("stale", policy);
    c.fetch_vwap_stock("TSLA");
    // Let the entry go stale on the same UTC day, then exhaust the budget.
    clock.advance(hours{13});
    const auto dir = c.policy().cache_dir;
    std::map<std::string, std::string> before;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().filename() != "rate_limit.json") before[e.path().filename()] = read_file(e.path());
    }
    EXPECT_EQ(code_of([&] { c.fetch_vwap_stock("TSLA"); }), ErrorCode::RateLimitExceeded);
    std::map<std::string, std::string> after;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().filename() != "rate_limit.json") after[e.path().filename()] = read_file(e.path());
    }
    EXPECT_EQ(before, after);
    EXPECT_EQ(stub.requests(), 1);
}

TEST_F(ClientTest, MissingApiKeyIsRejectedBeforeNetwork) {
    FetchPolicy policy;
    policy.cache_dir = testing::scratch_dir("nokey");
    ClientOptions opts;
    opts.api_base = stub.base_url();
    ::unsetenv(kApiKeyEnv);
    AlphaVantageClient c(policy, opts, clock.fn());
    EXPECT_EQ(code_of([&] { c.fetch_daily("AAPL", AssetClass::Stock); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(stub.requests(), 0);
}

TEST_F(ClientTest, ApiKeyFromEnvironment) {
    FetchPolicy policy;
    policy.cache_dir = testing::scratch_dir("envkey");
    ClientOptions opts;
    opts.api_base = stub.base_url();
    ::setenv(kApiKeyEnv, "from-env", 1);
    AlphaVantageClient c(policy, opts, clock.fn());
    c.fetch_daily("AAPL", AssetClass::Stock);
    ::unsetenv(kApiKeyEnv);
    EXPECT_EQ(stub.last_param("apikey"), "from-env");
}

TEST_F(ClientTest, FetchSerializeLoadRoundTrip) {
    auto c = client("roundtrip");
    for (const auto& s : {c.fetch_daily("AAPL", AssetClass::Stock),
                          c.fetch_intraday("ETH", AssetClass::Crypto),
                          c.fetch_intraday("AAPL", AssetClass::Stock)}) {
        const auto path = testing::scratch_dir("roundtrip_out") / (s.symbol() + ".csv");
        save_csv(s, path);
        EXPECT_EQ(load_csv(path, s.asset_class(), s.interval()), s);
    }
}

TEST_F(ClientTest, ConcurrentFetchesShareOneBudget) {
    FetchPolicy policy;
    policy.max_requests_per_minute = 3;
    auto c = client("concurrent", policy);
    std::atomic<int> ok{0};
    std::atomic<int> limited{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&, i] {
            try {
                c.fetch_daily("SYM" + std::to_string(i), AssetClass::Stock);
            } catch (const Error& e) {
                (e.code() == ErrorCode::RateLimitExceeded ? limited : ok)++;
            }
        });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(ok.load(), 3);
    EXPECT_EQ(limited.load(), 5);
    EXPECT_EQ(stub.requests(), 3);
}

TEST(RateLimiterTest, WindowAndDailyBoundsHoldForRandomSchedules) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        ManualClock clock;
        const std::size_t per_minute = 1 + rng() % 6;
        const std::size_t per_day = per_minute + rng() % 40;
        RateLimiter limiter(per_minute, per_day, std::nullopt, clock.fn());
        std::vector<system_clock::time_point> granted;
        for (int call = 0; call < 300; ++call) {
            clock.advance(milliseconds(rng() % 30000));
            try {
                limiter.acquire();
                granted.push_back(*clock.now);
            } catch (const Error& e) {
                ASSERT_EQ(e.code(), ErrorCode::RateLimitExceeded);
            }
        }
        for (std::size_t i = 0; i < granted.size(); ++i) {
            std::size_t in_window = 0;
            std::size_t same_day = 0;
            for (std::size_t j = 0; j <= i; ++j) {
                if (granted[i] - granted[j] < seconds{60}) ++in_window;
                if (floor<days>(granted[j]) == floor<days>(granted[i])) ++same_day;
            }
            ASSERT_LE(in_window, per_minute);
            ASSERT_LE(same_day, per_day);
        }
    }
}

TEST(RateLimiterTest, StatePersistsAcrossInstances) {
    ManualClock clock;
    const auto file = testing::scratch_dir("limiter_state") / "rate_limit.json";
    {
        RateLimiter a(2, 10, file, clock.fn());
        a.acquire();
        a.acquire();
    }
    RateLimiter b(2, 10, file, clock.fn());
    EXPECT_EQ(b.requests_last_minute(), 2u);
    EXPECT_EQ(b.requests_today(), 2u);
    EXPECT_THROW(b.acquire(), Error);
    clock.advance(seconds{61});
    EXPECT_NO_THROW(b.acquire());
}

TEST(RateLimiterTest, DailyCountResetsAtUtcMidnight) {
    ManualClock clock;
    RateLimiter limiter(5, 2, std::nullopt, clock.fn());
    limiter.acquire();
    clock.advance(minutes{5});
    limiter.acquire();
    clock.advance(minutes{5});
    EXPECT_THROW(limiter.acquire(), Error);
    clock.advance(hours{24});
    EXPECT_NO_THROW(limiter.acquire());
    EXPECT_EQ(limiter.requests_today(), 1u);
}

TEST(PayloadTest, ErrorDocumentsBecomeApiErrors) {
    for (const char* key : {"Error Message", "Note", "Information"}) {
        const std::string doc = std::string("{\"") + key + "\": \"slow down\"}";
        try {
            parse_price_payload(doc, "X", AssetClass::Stock, kDaily);
            FAIL();
        } catch (const ApiError& e) {
            EXPECT_EQ(e.body_excerpt(), "slow down");
        }
    }
    EXPECT_THROW(parse_price_payload("not json", "X", AssetClass::Stock, kDaily), Error);
    EXPECT_THROW(parse_vwap_payload("{}"), Error);
}

TEST(PayloadTest, IndicatorCsvRoundTrip) {
    const auto s = testing::indicator({std::nullopt, 1.25, 3.0}, "VWAP");
    EXPECT_EQ(indicator_from_csv(indicator_to_csv(s)), s);
}

TEST(PolicyTest, Defaults) {
    const FetchPolicy p;
    EXPECT_EQ(p.max_requests_per_minute, 5u);
    EXPECT_EQ(p.max_requests_per_day, 500u);
    FetchPolicy bad;
    bad.max_requests_per_minute = 0;
    EXPECT_THROW(bad.validate(), Error);
    EXPECT_TRUE(is_crypto_symbol("eth"));
    EXPECT_FALSE(is_crypto_symbol("AAPL"));
}

}  // namespace
}  // namespace tradepipe
