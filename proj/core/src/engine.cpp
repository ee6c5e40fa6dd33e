#include "tradepipe/engine.hpp"

#include <algorithm>
#include <cmath>

#include "tradepipe/error.hpp"

namespace tradepipe {

BacktestConfig BacktestConfig::for_asset(AssetClass asset) {
    BacktestConfig config;
    config.fractional_units = asset == AssetClass::Crypto;
    return config;
}

void BacktestConfig::validate() const {
    if (!(std::isfinite(initial_capital) && initial_capital > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "initial capital must be > 0");
    }
    if (!(fee_rate >= 0.0 && fee_rate < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fee rate must lie in [0, 1)");
    }
}

std::string_view to_string(SkipReason reason) noexcept {
    switch (reason) {
        case SkipReason::AlreadyInvested: return "AlreadyInvested";
        case SkipReason::AlreadyFlat: return "AlreadyFlat";
        case SkipReason::InsufficientCashForOneShare: return "InsufficientCashForOneShare";
    }
    return "Unknown";
}

SkipReason parse_skip_reason(std::string_view text) {
    if (text == "AlreadyInvested") return SkipReason::AlreadyInvested;
    if (text == "AlreadyFlat") return SkipReason::AlreadyFlat;
    if (text == "InsufficientCashForOneShare") return SkipReason::InsufficientCashForOneShare;
    throw Error(ErrorCode::InvalidArgument, "unknown skip reason '" + std::string(text) + "'");
}

namespace {

class Ledger {
public:
    explicit Ledger(const BacktestConfig& config)
        : config_(config), cash_(config.initial_capital) {}

    SignalOutcome apply(const Signal& signal, double price, BacktestResult& result) {
        if (signal.side == Side::Buy) return buy(signal.timestamp, price, result);
        return sell(signal.timestamp, price, result);
    }

    PortfolioSnapshot mark(Timestamp ts, double close) const {
        const double holding = units_ * close;
        return {ts, cash_, units_, holding, cash_ + holding};
    }

private:
    SignalOutcome buy(Timestamp ts, double price, BacktestResult& result) {
        if (units_ > 0.0) return {std::nullopt, SkipReason::AlreadyInvested};
        const double unit_cost = price * (1.0 + config_.fee_rate);
        double units = cash_ / unit_cost;
        if (!config_.fractional_units) units = std::floor(units);
        if (units <= 0.0) {
            result.warnings.push_back("buy at " + format_timestamp(ts) +
                                      " skipped: cash cannot cover one share");
            return {std::nullopt, SkipReason::InsufficientCashForOneShare};
        }
        const double fee = units * price * config_.fee_rate;
        // All-in: in fractional mode the whole balance is spent by definition.
        cash_ = config_.fractional_units ? 0.0 : std::max(0.0, cash_ - units * unit_cost);
        units_ = units;
        result.trades.push_back({ts, Side::Buy, price, units, fee});
        return {result.trades.size() - 1, std::nullopt};
    }

    SignalOutcome sell(Timestamp ts, double price, BacktestResult& result) {
        if (units_ <= 0.0) return {std::nullopt, SkipReason::AlreadyFlat};
        const double fee = units_ * price * config_.fee_rate;
        cash_ += units_ * price * (1.0 - config_.fee_rate);
        result.trades.push_back({ts, Side::Sell, price, units_, fee});
        units_ = 0.0;
        return {result.trades.size() - 1, std::nullopt};
    }

    BacktestConfig config_;
    double cash_;
    double units_ = 0.0;
};

}  // namespace

BacktestResult run_backtest(const PriceSeries& series, std::span<const Signal> signals,
                            const BacktestConfig& config) {
    config.validate();

    // Bucket signals by bar, keeping their input order within a bar.
    std::vector<std::vector<std::size_t>> by_bar(series.size());
    for (std::size_t k = 0; k < signals.size(); ++k) {
        const auto idx = series.index_of(signals[k].timestamp);
        if (!idx) {
            throw Error(ErrorCode::SignalNotInSeries,
                        "signal at " + format_timestamp(signals[k].timestamp) +
                            " has no matching bar in '" + series.symbol() + "'");
        }
        by_bar[*idx].push_back(k);
    }

    BacktestResult result;
    result.snapshots.reserve(series.size());
    result.outcomes.resize(signals.size());
    Ledger ledger(config);
    for (std::size_t t = 0; t < series.size(); ++t) {
        const Bar& bar = series[t];
        for (const auto k : by_bar[t]) {
            result.outcomes[k] = ledger.apply(signals[k], bar.close, result);
        }
        result.snapshots.push_back(ledger.mark(bar.timestamp, bar.close));
    }
    return result;
}

BacktestResult run_buy_and_hold(const PriceSeries& series, const BacktestConfig& config) {
    const Signal entry{series.front().timestamp, Side::Buy, series.front().close,
                       StrategyKind::BuyHold};
    return run_backtest(series, std::span<const Signal>(&entry, 1), config);
}

}  // namespace tradepipe
