#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tradepipe/signals.hpp"

namespace tradepipe {

struct BacktestConfig {
    double initial_capital = 10'000.0;
    double fee_rate = 0.001;        // fraction of notional per transaction
    bool fractional_units = false;  // integer shares unless the asset is divisible

    /// Defaults with fractional_units set for crypto, cleared for stocks.
    static BacktestConfig for_asset(AssetClass asset);

    /// Throws InvalidArgument unless initial_capital > 0 and 0 <= fee_rate < 1.
    void validate() const;
};

struct PortfolioSnapshot {
    Timestamp timestamp;
    double cash = 0.0;
    double units = 0.0;
    double holding_value = 0.0;  // units * close
    double total = 0.0;          // cash + holding_value

    friend bool operator==(const PortfolioSnapshot&, const PortfolioSnapshot&) = default;
};

struct Trade {
    Timestamp timestamp;
    Side side = Side::Buy;
    double price = 0.0;
    double units = 0.0;
    double fee_paid = 0.0;  // units * price * fee_rate

    friend bool operator==(const Trade&, const Trade&) = default;
};

enum class SkipReason { AlreadyInvested, AlreadyFlat, InsufficientCashForOneShare };

std::string_view to_string(SkipReason reason) noexcept;
SkipReason parse_skip_reason(std::string_view text);

/// What happened to one input signal: it produced a trade, or it was
/// skipped for a reason.
struct SignalOutcome {
    std::optional<std::size_t> trade_index;
    std::optional<SkipReason> skip;

    friend bool operator==(const SignalOutcome&, const SignalOutcome&) = default;
};

struct BacktestResult {
    std::vector<PortfolioSnapshot> snapshots;  // one per bar
    std::vector<Trade> trades;
    std::vector<SignalOutcome> outcomes;  // parallel to the input signals
    std::vector<std::string> warnings;

    friend bool operator==(const BacktestResult&, const BacktestResult&) = default;
};

/// All-in/all-out simulation executed at each signal bar's close.
///
/// A Buy while flat spends all cash: units = cash / (price * (1 + fee)),
/// floored when units are whole shares. A Sell while invested liquidates
/// everything and credits units * price * (1 - fee). Same-side signals are
/// skipped. An open position at the end is marked to market, not sold.
/// Throws SignalNotInSeries when a signal's timestamp has no bar.
BacktestResult run_backtest(const PriceSeries& series, std::span<const Signal> signals,
                            const BacktestConfig& config);

/// Single Buy at the first bar's close, held to the end.
BacktestResult run_buy_and_hold(const PriceSeries& series, const BacktestConfig& config);

}  // namespace tradepipe
