#include "tradepipe/alpha_vantage.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "tradepipe/error.hpp"

namespace tradepipe {

namespace {

using nlohmann::json;

constexpr std::size_t kExcerptLength = 240;

std::string excerpt(const std::string& body) {
    return body.size() <= kExcerptLength ? body : body.substr(0, kExcerptLength) + "...";
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string url_encode(const std::string& value) {
    std::string out;
    for (unsigned char c : value) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            std::array<char, 4> buf{};
            std::snprintf(buf.data(), buf.size(), "%%%02X", c);
            out += buf.data();
        }
    }
    return out;
}

json parse_document(const std::string& text) {
    auto doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::MalformedPayload, "response is not a JSON object: " + excerpt(text));
    }
    return doc;
}

// Finds the first top-level key containing `needle`.
const json* find_section(const json& doc, std::string_view needle) {
    for (const auto& [key, value] : doc.items()) {
        if (key.find(needle) != std::string::npos) return &value;
    }
    return nullptr;
}

// Alpha Vantage reports errors and throttling as HTTP 200 documents.
void raise_api_message(const json& doc) {
    for (const char* key : {"Error Message", "Note", "Information"}) {
        if (const auto it = doc.find(key); it != doc.end()) {
            throw ApiError(200, it->is_string() ? it->get<std::string>() : it->dump());
        }
    }
}

enum class Zone { Utc, UsEastern };

Zone zone_of(const json& doc) {
    const json* meta = find_section(doc, "Meta Data");
    if (!meta || !meta->is_object()) return Zone::Utc;
    for (const auto& [key, value] : meta->items()) {
        if (key.find("Time Zone") == std::string::npos || !value.is_string()) continue;
        const auto tz = value.get<std::string>();
        if (tz.find("Eastern") != std::string::npos || tz.find("New_York") != std::string::npos) {
            return Zone::UsEastern;
        }
        if (tz.find("UTC") != std::string::npos || tz.find("GMT") != std::string::npos) {
            return Zone::Utc;
        }
        throw Error(ErrorCode::MalformedPayload, "unsupported time zone '" + tz + "'");
    }
    return Zone::Utc;
}

Timestamp to_utc(const std::string& key, Zone zone) {
    Timestamp ts;
    try {
        ts = parse_timestamp(key);
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedPayload, e.detail());
    }
    // Date-only keys are daily bars and stay on UTC midnight.
    if (zone == Zone::UsEastern && key.size() > 10) {
        return us_eastern_to_utc(std::chrono::local_seconds{ts.time_since_epoch()});
    }
    return ts;
}

double number_field(const json& value, const std::string& what) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
        const auto s = value.get<std::string>();
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec == std::errc{} && ptr == s.data() + s.size()) return out;
    }
    throw Error(ErrorCode::MalformedPayload, "non-numeric " + what + ": " + value.dump());
}

// Field name after the ordinal prefix: "1. open" -> "open",
// "1b. open (USD)" -> "open (usd)".
std::string field_name(const std::string& key) {
    const auto dot = key.find(". ");
    return lower(dot == std::string::npos ? key : key.substr(dot + 2));
}

double ohlcv_field(const json& entry, std::string_view name, const std::string& market) {
    const json* plain = nullptr;
    const json* in_market = nullptr;
    const json* any = nullptr;
    const auto market_tag = "(" + lower(market) + ")";
    for (const auto& [key, value] : entry.items()) {
        const auto f = field_name(key);
        if (f.rfind(name, 0) != 0) continue;
        if (!any) any = &value;
        if (f == name && !plain) plain = &value;
        if (f.find(market_tag) != std::string::npos && !in_market) in_market = &value;
    }
    const json* chosen = plain ? plain : (in_market ? in_market : any);
    if (!chosen) {
        throw Error(ErrorCode::MalformedPayload, "bar lacks a '" + std::string(name) + "' field");
    }
    return number_field(*chosen, std::string(name));
}

}  // namespace

PriceSeries parse_price_payload(const std::string& json_text, const std::string& symbol,
                                AssetClass asset, Interval interval) {
    const auto doc = parse_document(json_text);
    const json* series = find_section(doc, "Time Series");
    if (!series) {
        raise_api_message(doc);
        throw Error(ErrorCode::MalformedPayload, "no time series in response: " + excerpt(json_text));
    }
    if (!series->is_object()) throw Error(ErrorCode::MalformedPayload, "time series is not an object");
    const Zone zone = zone_of(doc);

    std::vector<Bar> bars;
    bars.reserve(series->size());
    for (const auto& [key, entry] : series->items()) {
        if (!entry.is_object()) throw Error(ErrorCode::MalformedPayload, "bar " + key + " is not an object");
        Bar bar;
        bar.timestamp = to_utc(key, zone);
        bar.open = ohlcv_field(entry, "open", "USD");
        bar.high = ohlcv_field(entry, "high", "USD");
        bar.low = ohlcv_field(entry, "low", "USD");
        bar.close = ohlcv_field(entry, "close", "USD");
        bar.volume = ohlcv_field(entry, "volume", "USD");
        if (auto why = bar_violation(bar)) {
            throw Error(ErrorCode::MalformedPayload, "bar " + key + ": " + *why);
        }
        bars.push_back(bar);
    }
    if (bars.empty()) throw Error(ErrorCode::EmptySeries, "response for '" + symbol + "' has no bars");
    std::sort(bars.begin(), bars.end(),
              [](const Bar& a, const Bar& b) { return a.timestamp < b.timestamp; });
    try {
        return PriceSeries(symbol, asset, interval, std::move(bars));
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedPayload, e.detail());
    }
}

IndicatorSeries parse_vwap_payload(const std::string& json_text) {
    const auto doc = parse_document(json_text);
    const json* section = find_section(doc, "Technical Analysis");
    if (!section) {
        raise_api_message(doc);
        throw Error(ErrorCode::MalformedPayload, "no VWAP section in response: " + excerpt(json_text));
    }
    if (!section->is_object()) throw Error(ErrorCode::MalformedPayload, "VWAP section is not an object");
    const Zone zone = zone_of(doc);

    IndicatorSeries out{"VWAP", {}};
    for (const auto& [key, entry] : section->items()) {
        const auto it = entry.find("VWAP");
        if (it == entry.end()) throw Error(ErrorCode::MalformedPayload, "point " + key + " lacks VWAP");
        out.points.push_back({to_utc(key, zone), number_field(*it, "VWAP")});
    }
    if (out.points.empty()) throw Error(ErrorCode::EmptySeries, "VWAP response has no points");
    std::sort(out.points.begin(), out.points.end(),
              [](const IndicatorPoint& a, const IndicatorPoint& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < out.points.size(); ++i) {
        if (out.points[i].timestamp == out.points[i - 1].timestamp) {
            throw Error(ErrorCode::MalformedPayload, "duplicate VWAP timestamp");
        }
    }
    return out;
}

std::string indicator_to_csv(const IndicatorSeries& series) {
    std::ostringstream out;
    out << "timestamp," << series.name << '\n';
    for (const auto& p : series.points) {
        out << format_timestamp(p.timestamp) << ',';
        if (p.value) out << format_number(*p.value);
        out << '\n';
    }
    return out.str();
}

IndicatorSeries indicator_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptySeries, "empty indicator CSV");
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::MissingColumn, "indicator CSV header");
    IndicatorSeries out{line.substr(comma + 1), {}};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto c = line.find(',');
        if (c == std::string::npos) throw RowError(line_no, "missing value column");
        IndicatorPoint p{parse_timestamp(line.substr(0, c)), std::nullopt};
        const auto cell = line.substr(c + 1);
        if (!cell.empty()) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw RowError(line_no, "bad number '" + cell + "'");
            }
            p.value = v;
        }
        out.points.push_back(p);
    }
    return out;
}

AlphaVantageClient::AlphaVantageClient(FetchPolicy policy, ClientOptions options, Clock clock)
    : AlphaVantageClient(policy, options, make_http_transport(options.api_base), std::move(clock)) {}

AlphaVantageClient::AlphaVantageClient(FetchPolicy policy, ClientOptions options,
                                       std::unique_ptr<HttpTransport> transport, Clock clock)
    : policy_((policy.validate(), std::move(policy))),
      options_(std::move(options)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      limiter_(policy_.max_requests_per_minute, policy_.max_requests_per_day,
               policy_.cache_dir / "rate_limit.json", clock_),
      cache_(policy_.cache_dir, policy_.cache_ttl, clock_) {}

std::string AlphaVantageClient::cache_key(const std::string& function, const std::string& symbol,
                                          const std::string& interval) const {
    const auto today = format_date(std::chrono::floor<std::chrono::seconds>(clock_()));
    return function + "_" + symbol + "_" + interval + "_" + today;
}

std::string AlphaVantageClient::request(const std::string& function, const std::string& query) {
    std::string key = options_.api_key.value_or("");
    if (key.empty()) {
        if (const char* env = std::getenv(kApiKeyEnv)) key = env;
    }
    if (key.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("no API key: set ") + kApiKeyEnv + " or pass one explicitly");
    }
    limiter_.acquire();
    ++requests_issued_;
    const auto response = transport_->get("/query?function=" + function + query +
                                          "&apikey=" + url_encode(key));
    if (response.status != 200) throw ApiError(response.status, excerpt(response.body));
    return response.body;
}

PriceSeries AlphaVantageClient::fetch_daily(const std::string& symbol, AssetClass asset) {
    const bool crypto = asset == AssetClass::Crypto;
    const std::string function = crypto ? "DIGITAL_CURRENCY_DAILY" : "TIME_SERIES_DAILY";
    const auto key = cache_key(function, symbol, "daily");
    if (auto cached = cache_.get(key)) {
        std::istringstream in(*cached);
        return parse_csv(in, symbol, asset, kDaily);
    }
    std::string query = "&symbol=" + url_encode(symbol);
    if (crypto) query += "&market=" + url_encode(options_.market);
    auto series = parse_price_payload(request(function, query), symbol, asset, kDaily);
    std::ostringstream csv;
    write_csv(series, csv);
    cache_.put(key, csv.str());
    return series;
}

PriceSeries AlphaVantageClient::fetch_intraday(const std::string& symbol, AssetClass asset,
                                               Interval interval) {
    const bool crypto = asset == AssetClass::Crypto;
    const std::string function = crypto ? "CRYPTO_INTRADAY" : "TIME_SERIES_INTRADAY";
    const auto name = interval_name(interval);
    const auto key = cache_key(function, symbol, name);
    if (auto cached = cache_.get(key)) {
        std::istringstream in(*cached);
        return parse_csv(in, symbol, asset, interval);
    }
    std::string query = "&symbol=" + url_encode(symbol) + "&interval=" + url_encode(name);
    if (crypto) query += "&market=" + url_encode(options_.market);
    auto series = parse_price_payload(request(function, query), symbol, asset, interval);
    std::ostringstream csv;
    write_csv(series, csv);
    cache_.put(key, csv.str());
    return series;
}

bool is_crypto_symbol(std::string_view symbol) {
    static constexpr std::array<std::string_view, 20> kCrypto{
        "ADA", "AVAX", "BCH", "BNB", "BTC", "DOGE", "DOT", "ETC", "ETH", "LINK",
        "LTC", "MATIC", "SHIB", "SOL", "TRX", "UNI", "USDC", "USDT", "XLM", "XRP"};
    std::string upper(symbol);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return std::find(kCrypto.begin(), kCrypto.end(), upper) != kCrypto.end();
}

IndicatorSeries AlphaVantageClient::fetch_vwap_stock(const std::string& symbol, Interval interval) {
    if (is_crypto_symbol(symbol)) {
        throw Error(ErrorCode::UnsupportedAsset,
                    "the VWAP endpoint covers stocks only; compute VWAP locally for '" + symbol + "'");
    }
    const auto name = interval_name(interval);
    const auto key = cache_key("VWAP", symbol, name);
    if (auto cached = cache_.get(key)) return indicator_from_csv(*cached);
    auto series = parse_vwap_payload(
        request("VWAP", "&symbol=" + url_encode(symbol) + "&interval=" + url_encode(name)));
    cache_.put(key, indicator_to_csv(series));
    return series;
}

}  // namespace tradepipe
