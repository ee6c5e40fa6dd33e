#include "tradepipe/signals.hpp"

#include "tradepipe/error.hpp"

namespace tradepipe {

std::string_view to_string(Side side) noexcept { return side == Side::Buy ? "Buy" : "Sell"; }

std::string_view to_string(StrategyKind strategy) noexcept {
    switch (strategy) {
        case StrategyKind::MaCrossover: return "MaCrossover";
        case StrategyKind::VwapCross: return "VwapCross";
        case StrategyKind::BuyHold: return "BuyHold";
    }
    return "Unknown";
}

Side parse_side(std::string_view text) {
    if (text == "Buy") return Side::Buy;
    if (text == "Sell") return Side::Sell;
    throw Error(ErrorCode::InvalidArgument, "unknown side '" + std::string(text) + "'");
}

StrategyKind parse_strategy(std::string_view text) {
    if (text == "ma" || text == "MaCrossover") return StrategyKind::MaCrossover;
    if (text == "vwap" || text == "VwapCross") return StrategyKind::VwapCross;
    if (text == "buyhold" || text == "BuyHold") return StrategyKind::BuyHold;
    throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(text) + "'");
}

std::vector<Crossing> crossing_points(const IndicatorSeries& fast, const IndicatorSeries& slow) {
    if (!aligned(fast, slow)) {
        throw Error(ErrorCode::MisalignedSeries,
                    "'" + fast.name + "' and '" + slow.name + "' do not share timestamps");
    }
    std::vector<Crossing> out;
    for (std::size_t t = 1; t < fast.size(); ++t) {
        const auto& f0 = fast.points[t - 1].value;
        const auto& s0 = slow.points[t - 1].value;
        const auto& f1 = fast.points[t].value;
        const auto& s1 = slow.points[t].value;
        if (!f0 || !s0 || !f1 || !s1) continue;
        if (*f0 <= *s0 && *f1 > *s1) {
            out.push_back({t, Side::Buy});
        } else if (*f0 >= *s0 && *f1 < *s1) {
            out.push_back({t, Side::Sell});
        }
    }
    return out;
}

std::vector<Signal> crossings(const IndicatorSeries& fast, const IndicatorSeries& slow,
                              StrategyKind strategy) {
    std::vector<Signal> out;
    for (const auto& c : crossing_points(fast, slow)) {
        const auto& p = fast.points[c.index];
        out.push_back({p.timestamp, c.side, *p.value, strategy});
    }
    return out;
}

std::vector<Signal> ma_crossover_signals(const PriceSeries& series, std::size_t short_window,
                                         std::size_t long_window) {
    if (short_window >= long_window) {
        throw Error(ErrorCode::WindowOrder, "short window " + std::to_string(short_window) +
                                                " must be smaller than long window " +
                                                std::to_string(long_window));
    }
    const auto fast = sma(series, short_window);
    const auto slow = sma(series, long_window);
    std::vector<Signal> out;
    for (const auto& c : crossing_points(fast, slow)) {
        out.push_back({series[c.index].timestamp, c.side, series[c.index].close,
                       StrategyKind::MaCrossover});
    }
    return out;
}

std::vector<Signal> vwap_cross_signals(const PriceSeries& series, const IndicatorSeries& vwap) {
    if (!aligned(series, vwap)) {
        throw Error(ErrorCode::MisalignedSeries, "VWAP series is not aligned to the price bars");
    }
    return crossings(close_series(series), vwap, StrategyKind::VwapCross);
}

}  // namespace tradepipe
