#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "tradepipe/indicators.hpp"

namespace tradepipe {

enum class Side { Buy, Sell };

enum class StrategyKind { MaCrossover, VwapCross, BuyHold };

std::string_view to_string(Side side) noexcept;
std::string_view to_string(StrategyKind strategy) noexcept;
Side parse_side(std::string_view text);
StrategyKind parse_strategy(std::string_view text);

struct Signal {
    Timestamp timestamp;
    Side side = Side::Buy;
    double trigger_price = 0.0;  // close of the signal bar
    StrategyKind strategy = StrategyKind::MaCrossover;

    friend bool operator==(const Signal&, const Signal&) = default;
};

struct Crossing {
    std::size_t index = 0;
    Side side = Side::Buy;

    friend bool operator==(const Crossing&, const Crossing&) = default;
};

/// Strict crossings of `fast` through `slow`.
///
/// Buy at t when fast[t-1] <= slow[t-1] and fast[t] > slow[t]; Sell when
/// fast[t-1] >= slow[t-1] and fast[t] < slow[t]. Both bars t-1 and t must
/// carry values in both series, so the first comparable bar (and the first
/// bar after any gap) never fires. Throws MisalignedSeries.
std::vector<Crossing> crossing_points(const IndicatorSeries& fast, const IndicatorSeries& slow);

/// crossing_points as signals; trigger_price is the fast value at the bar.
std::vector<Signal> crossings(const IndicatorSeries& fast, const IndicatorSeries& slow,
                              StrategyKind strategy);

/// Golden/death crosses of SMA(short) against SMA(long), priced at the
/// signal bar's close. Throws WindowOrder when short_window >= long_window.
std::vector<Signal> ma_crossover_signals(const PriceSeries& series, std::size_t short_window,
                                         std::size_t long_window);

/// Close price crossing `vwap` from below (Buy) or above (Sell).
std::vector<Signal> vwap_cross_signals(const PriceSeries& series, const IndicatorSeries& vwap);

}  // namespace tradepipe
