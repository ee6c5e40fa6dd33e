#include "tradepipe/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tradepipe/error.hpp"

namespace tradepipe {

MetricsParams MetricsParams::defaults_for(AssetClass asset, Interval interval) {
    using namespace std::chrono;
    const bool crypto = asset == AssetClass::Crypto;
    const double days_per_year = crypto ? 365.0 : 252.0;
    const double session_seconds =
        crypto ? 86400.0 : static_cast<double>(duration_cast<seconds>(hours{6} + minutes{30}).count());

    MetricsParams params;
    if (interval >= kDaily) {
        params.periods_per_year =
            days_per_year * static_cast<double>(kDaily.count()) / static_cast<double>(interval.count());
    } else {
        params.periods_per_year =
            days_per_year * session_seconds / static_cast<double>(interval.count());
    }
    return params;
}

std::vector<double> roi_series(std::span<const PortfolioSnapshot> snapshots,
                               double initial_capital) {
    std::vector<double> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back(s.total / initial_capital - 1.0);
    return out;
}

double sharpe(std::span<const PortfolioSnapshot> snapshots, double risk_free_rate,
              double periods_per_year) {
    if (snapshots.size() < 3) {
        throw Error(ErrorCode::TooFewPoints, "Sharpe ratio needs at least 3 snapshots, got " +
                                                 std::to_string(snapshots.size()));
    }
    if (!(periods_per_year > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "periods_per_year must be > 0");
    }
    std::vector<double> returns;
    returns.reserve(snapshots.size() - 1);
    for (std::size_t t = 1; t < snapshots.size(); ++t) {
        returns.push_back(snapshots[t].total / snapshots[t - 1].total - 1.0);
    }
    const auto n = static_cast<double>(returns.size());
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= n;
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) {
        throw Error(ErrorCode::ZeroVolatility, "portfolio returns have zero variance");
    }
    const double rf_per_period = risk_free_rate / periods_per_year;
    return (mean - rf_per_period) / sd * std::sqrt(periods_per_year);
}

MetricsSummary summarize(std::span<const PortfolioSnapshot> snapshots, double initial_capital,
                         const MetricsParams& params) {
    if (!(initial_capital > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "initial capital must be > 0");
    }
    MetricsSummary summary;
    summary.roi_series = roi_series(snapshots, initial_capital);
    summary.gross_roi = summary.roi_series.empty() ? 0.0 : summary.roi_series.back();
    summary.periods_per_year = params.periods_per_year;
    summary.risk_free_rate = params.risk_free_rate;
    try {
        summary.sharpe = sharpe(snapshots, params.risk_free_rate, params.periods_per_year);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroVolatility && e.code() != ErrorCode::TooFewPoints) throw;
        summary.sharpe_error = std::string(to_string(e.code()));
    }
    return summary;
}

std::pair<MetricsSummary, MetricsSummary> compare(std::span<const PortfolioSnapshot> strategy,
                                                  std::span<const PortfolioSnapshot> baseline,
                                                  double initial_capital,
                                                  const MetricsParams& params) {
    const bool same_clock = std::equal(
        strategy.begin(), strategy.end(), baseline.begin(), baseline.end(),
        [](const PortfolioSnapshot& a, const PortfolioSnapshot& b) {
            return a.timestamp == b.timestamp;
        });
    if (!same_clock) {
        throw Error(ErrorCode::MisalignedSeries,
                    "strategy and baseline snapshots do not share timestamps");
    }
    return {summarize(strategy, initial_capital, params),
            summarize(baseline, initial_capital, params)};
}

}  // namespace tradepipe
