#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tradepipe/engine.hpp"

namespace tradepipe {

struct MetricsParams {
    double risk_free_rate = 0.0;     // annual fraction
    double periods_per_year = 252.0;

    /// Annualization by asset and bar size: 252 trading days of 6.5 h for
    /// stocks, 365 days of 24 h for crypto. Daily stock gives 252, 5-min
    /// stock 252 * 78, daily crypto 365, 5-min crypto 365 * 288.
    static MetricsParams defaults_for(AssetClass asset, Interval interval);
};

struct MetricsSummary {
    double gross_roi = 0.0;
    /// Absent when the Sharpe ratio is undefined for the run; sharpe_error
    /// then names the reason (ZeroVolatility, TooFewPoints).
    std::optional<double> sharpe;
    std::string sharpe_error;
    std::vector<double> roi_series;
    double periods_per_year = 0.0;
    double risk_free_rate = 0.0;

    friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

/// total_t / initial_capital - 1 for every snapshot.
std::vector<double> roi_series(std::span<const PortfolioSnapshot> snapshots,
                               double initial_capital);

/// Annualized Sharpe ratio of per-bar simple returns of the portfolio total:
/// mean(r - rf / periods_per_year) / sample_std(r) * sqrt(periods_per_year).
/// Throws TooFewPoints (< 3 snapshots) or ZeroVolatility.
double sharpe(std::span<const PortfolioSnapshot> snapshots, double risk_free_rate,
              double periods_per_year);

MetricsSummary summarize(std::span<const PortfolioSnapshot> snapshots, double initial_capital,
                         const MetricsParams& params);

/// Strategy and baseline summaries computed with identical parameters.
/// Throws MisalignedSeries unless both runs share timestamps.
std::pair<MetricsSummary, MetricsSummary> compare(std::span<const PortfolioSnapshot> strategy,
                                                  std::span<const PortfolioSnapshot> baseline,
                                                  double initial_capital,
                                                  const MetricsParams& params);

}  // namespace tradepipe
