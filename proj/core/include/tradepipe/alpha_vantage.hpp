#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tradepipe/indicators.hpp"
#include "tradepipe/market_data.hpp"

namespace tradepipe {

/// Client-side request budget and cache settings.
struct FetchPolicy {
    std::size_t max_requests_per_minute = 5;
    std::size_t max_requests_per_day = 500;
    std::filesystem::path cache_dir = ".tradepipe-cache";
    std::chrono::seconds cache_ttl = std::chrono::hours{12};

    /// Throws InvalidArgument unless both limits are positive.
    void validate() const;
};

using Clock = std::function<std::chrono::system_clock::time_point()>;

/// The wall clock.
Clock system_clock();

/// Sliding-window request budget: at most N requests in any 60-second
/// window and M per UTC calendar day. The ledger is persisted to
/// `state_file` (when given) after every granted request and reloaded on
/// construction. Thread-safe.
class RateLimiter {
public:
    RateLimiter(std::size_t per_minute, std::size_t per_day,
                std::optional<std::filesystem::path> state_file = std::nullopt,
                Clock clock = system_clock());

    /// Records one request or throws RateLimitExceeded without recording.
    void acquire();

    std::size_t requests_last_minute() const;
    std::size_t requests_today() const;

private:
    using TimePoint = std::chrono::system_clock::time_point;

    void prune(TimePoint now) const;
    void load();
    void save() const;

    std::size_t per_minute_;
    std::size_t per_day_;
    std::optional<std::filesystem::path> state_file_;
    Clock clock_;

    mutable std::mutex mutex_;
    mutable std::deque<TimePoint> recent_;
    mutable std::chrono::sys_days day_{};
    mutable std::size_t day_count_ = 0;
};

/// Fetched payloads persisted as CSV under a directory, with a fetch-time
/// index for TTL checks. Thread-safe.
class SeriesCache {
public:
    SeriesCache(std::filesystem::path dir, std::chrono::seconds ttl, Clock clock = system_clock());

    /// Cached text for `key` if it was stored less than ttl ago.
    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& csv_text);

    std::filesystem::path path_for(const std::string& key) const;

private:
    std::map<std::string, std::int64_t> read_index() const;
    void write_index(const std::map<std::string, std::int64_t>& index) const;

    std::filesystem::path dir_;
    std::chrono::seconds ttl_;
    Clock clock_;
    mutable std::mutex mutex_;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// GET transport. `target` is a path plus query string, e.g.
/// `/query?function=TIME_SERIES_DAILY&symbol=AAPL`.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& target) = 0;
};

/// HTTP(S) transport rooted at `base_url` (`scheme://host[:port][/prefix]`).
std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url);

inline constexpr const char* kDefaultApiBase = "https://www.alphavantage.co";
inline constexpr const char* kApiKeyEnv = "ALPHAVANTAGE_API_KEY";

struct ClientOptions {
    std::string api_base = kDefaultApiBase;
    /// Falls back to the ALPHAVANTAGE_API_KEY environment variable.
    std::optional<std::string> api_key;
    std::string market = "USD";  // quote currency for crypto endpoints
};

/// Alpha-Vantage-compatible market data client.
///
/// Every call first consults the cache; a fresh hit issues no request and
/// spends no budget. Misses acquire one request from the rate limiter
/// (persisted next to the cache) before touching the network, and store
/// the parsed result back as canonical CSV.
class AlphaVantageClient {
public:
    AlphaVantageClient(FetchPolicy policy, ClientOptions options = {},
                       Clock clock = system_clock());
    AlphaVantageClient(FetchPolicy policy, ClientOptions options,
                       std::unique_ptr<HttpTransport> transport, Clock clock = system_clock());

    /// TIME_SERIES_DAILY (stocks) or DIGITAL_CURRENCY_DAILY (crypto).
    PriceSeries fetch_daily(const std::string& symbol, AssetClass asset);

    /// TIME_SERIES_INTRADAY (stocks) or CRYPTO_INTRADAY (crypto).
    PriceSeries fetch_intraday(const std::string& symbol, AssetClass asset,
                               Interval interval = kFiveMinutes);

    /// VWAP technical indicator. Stocks only: throws UnsupportedAsset for
    /// crypto tickers (see is_crypto_symbol), whose VWAP must be computed
    /// locally.
    IndicatorSeries fetch_vwap_stock(const std::string& symbol, Interval interval = kFiveMinutes);

    /// HTTP requests actually sent by this client.
    std::size_t requests_issued() const noexcept { return requests_issued_.load(); }

    const FetchPolicy& policy() const noexcept { return policy_; }

private:
    std::string request(const std::string& function, const std::string& query);
    std::string cache_key(const std::string& function, const std::string& symbol,
                          const std::string& interval) const;

    FetchPolicy policy_;
    ClientOptions options_;
    std::unique_ptr<HttpTransport> transport_;
    Clock clock_;
    RateLimiter limiter_;
    SeriesCache cache_;
    std::atomic<std::size_t> requests_issued_{0};
};

/// True for the major crypto tickers the API lists under its digital
/// currency endpoints (BTC, ETH, ...). Case-insensitive.
bool is_crypto_symbol(std::string_view symbol);

/// Payload parsers, exposed for tests. Throw MalformedPayload, ApiError
/// (for `Error Message`/`Note`/`Information` documents) or EmptySeries.
PriceSeries parse_price_payload(const std::string& json_text, const std::string& symbol,
                                AssetClass asset, Interval interval);
IndicatorSeries parse_vwap_payload(const std::string& json_text);

/// Indicator CSV: `timestamp,<name>` with empty cells for absent values.
std::string indicator_to_csv(const IndicatorSeries& series);
IndicatorSeries indicator_from_csv(const std::string& text);

}  // namespace tradepipe
