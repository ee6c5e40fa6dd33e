#include "tradepipe/indicators.hpp"

#include <algorithm>
#include <unordered_map>

#include "tradepipe/error.hpp"

namespace tradepipe {

std::string_view to_string(SessionMode mode) noexcept {
    return mode == SessionMode::DailyReset ? "DailyReset" : "Cumulative";
}

SessionMode parse_session_mode(std::string_view text) {
    if (text == "daily" || text == "DailyReset") return SessionMode::DailyReset;
    if (text == "cumulative" || text == "Cumulative") return SessionMode::Cumulative;
    throw Error(ErrorCode::InvalidArgument, "unknown session rule '" + std::string(text) + "'");
}

namespace {

// Mean of [first, last) with one residual-correction pass. The correction
// makes the mean of an all-equal window exactly that value, so two windows
// over a flat stretch compare equal and never register a false crossing.
double window_mean(const std::vector<double>& xs, std::size_t first, std::size_t last) {
    const auto n = static_cast<double>(last - first);
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) sum += xs[i];
    const double mean = sum / n;
    double residual = 0.0;
    for (std::size_t i = first; i < last; ++i) residual += xs[i] - mean;
    return mean + residual / n;
}

}  // namespace

IndicatorSeries sma(const PriceSeries& series, std::size_t window) {
    if (window == 0) throw Error(ErrorCode::WindowZero, "SMA window must be >= 1");
    if (window > series.size()) {
        throw Error(ErrorCode::WindowTooLarge,
                    "SMA window " + std::to_string(window) + " exceeds series length " +
                        std::to_string(series.size()));
    }
    const auto closes = series.closes();
    IndicatorSeries out{"SMA_" + std::to_string(window), {}};
    out.points.reserve(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        IndicatorPoint p{series[t].timestamp, std::nullopt};
        if (t + 1 >= window) p.value = window_mean(closes, t + 1 - window, t + 1);
        out.points.push_back(p);
    }
    return out;
}

IndicatorSeries vwap(const PriceSeries& series, SessionRule rule) {
    IndicatorSeries out{"VWAP", {}};
    out.points.reserve(series.size());

    double notional = 0.0;
    double volume = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const Bar& bar = series[t];
        const bool new_session =
            t == 0 || (rule.mode == SessionMode::DailyReset &&
                       utc_day(bar.timestamp) != utc_day(series[t - 1].timestamp));
        if (new_session) {
            notional = 0.0;
            volume = 0.0;
            lo = bar.close;
            hi = bar.close;
        }
        notional += bar.close * bar.volume;
        volume += bar.volume;
        lo = std::min(lo, bar.close);
        hi = std::max(hi, bar.close);

        IndicatorPoint p{bar.timestamp, std::nullopt};
        if (volume > 0.0) {
            // Rounding can push the ratio an ulp outside the prefix range.
            p.value = std::clamp(notional / volume, lo, hi);
        }
        out.points.push_back(p);
    }
    return out;
}

IndicatorSeries close_series(const PriceSeries& series) {
    IndicatorSeries out{"CLOSE", {}};
    out.points.reserve(series.size());
    for (const auto& bar : series.bars()) out.points.push_back({bar.timestamp, bar.close});
    return out;
}

IndicatorSeries align_to(const PriceSeries& series, const IndicatorSeries& indicator) {
    std::unordered_map<Timestamp::rep, std::optional<double>> by_time;
    by_time.reserve(indicator.points.size());
    for (const auto& p : indicator.points) by_time[p.timestamp.time_since_epoch().count()] = p.value;

    IndicatorSeries out{indicator.name, {}};
    out.points.reserve(series.size());
    for (const auto& bar : series.bars()) {
        const auto it = by_time.find(bar.timestamp.time_since_epoch().count());
        out.points.push_back({bar.timestamp, it == by_time.end() ? std::nullopt : it->second});
    }
    return out;
}

bool aligned(const IndicatorSeries& a, const IndicatorSeries& b) noexcept {
    return std::equal(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(),
                      [](const IndicatorPoint& x, const IndicatorPoint& y) {
                          return x.timestamp == y.timestamp;
                      });
}

bool aligned(const PriceSeries& series, const IndicatorSeries& indicator) noexcept {
    const auto bars = series.bars();
    return std::equal(bars.begin(), bars.end(), indicator.points.begin(), indicator.points.end(),
                      [](const Bar& b, const IndicatorPoint& p) {
                          return b.timestamp == p.timestamp;
                      });
}

}  // namespace tradepipe
