#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tradepipe/market_data.hpp"

namespace tradepipe {

struct IndicatorPoint {
    Timestamp timestamp;
    std::optional<double> value;  // absent during warm-up

    friend bool operator==(const IndicatorPoint&, const IndicatorPoint&) = default;
};

/// Per-bar indicator values aligned one-to-one with a PriceSeries.
struct IndicatorSeries {
    std::string name;
    std::vector<IndicatorPoint> points;

    std::size_t size() const noexcept { return points.size(); }

    friend bool operator==(const IndicatorSeries&, const IndicatorSeries&) = default;
};

enum class SessionMode {
    DailyReset,  // restart accumulation at each UTC midnight
    Cumulative,  // accumulate over the whole series
};

struct SessionRule {
    SessionMode mode = SessionMode::DailyReset;
};

std::string_view to_string(SessionMode mode) noexcept;
SessionMode parse_session_mode(std::string_view text);

/// Simple moving average of closes over `window` bars, named `SMA_<n>`.
/// Point t is absent for t < window - 1. Throws WindowZero or
/// WindowTooLarge (window > series length).
IndicatorSeries sma(const PriceSeries& series, std::size_t window);

/// Volume-weighted average of closes from the session start through each
/// bar, named `VWAP`. Absent while the session's cumulative volume is zero.
IndicatorSeries vwap(const PriceSeries& series, SessionRule rule = {});

/// Closing prices as an always-present indicator series named `CLOSE`.
IndicatorSeries close_series(const PriceSeries& series);

/// Re-indexes `indicator` onto the series' timestamps. Bars missing from
/// the indicator get absent values; indicator points without a bar are
/// dropped.
IndicatorSeries align_to(const PriceSeries& series, const IndicatorSeries& indicator);

/// True when both series carry identical timestamps in the same order.
bool aligned(const IndicatorSeries& a, const IndicatorSeries& b) noexcept;
bool aligned(const PriceSeries& series, const IndicatorSeries& indicator) noexcept;

}  // namespace tradepipe
