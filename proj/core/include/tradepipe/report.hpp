#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tradepipe/alpha_vantage.hpp"
#include "tradepipe/engine.hpp"
#include "tradepipe/metrics.hpp"

namespace tradepipe {

enum class DataSourceKind { Csv, Api };
enum class VwapSource { Local, Api };

std::string_view to_string(DataSourceKind kind) noexcept;
std::string_view to_string(VwapSource source) noexcept;

struct DataSource {
    DataSourceKind kind = DataSourceKind::Csv;
    std::filesystem::path csv_path;  // Csv
    std::string symbol;              // Api; optional override for Csv (default: file stem)
    AssetClass asset_class = AssetClass::Stock;
    Interval interval = kDaily;
    std::string api_base = kDefaultApiBase;  // Api
    std::filesystem::path cache_dir = ".tradepipe-cache";

    friend bool operator==(const DataSource&, const DataSource&) = default;
};

/// Everything needed to reproduce one pipeline run.
struct RunConfig {
    StrategyKind strategy = StrategyKind::MaCrossover;
    DataSource source;
    std::size_t short_window = 50;
    std::size_t long_window = 200;
    SessionRule session;
    VwapSource vwap_source = VwapSource::Local;
    BacktestConfig backtest;
    MetricsParams metrics;
    std::optional<double> fraction;  // trailing share of the loaded bars
    std::optional<Timestamp> from;
    std::optional<Timestamp> to;
    std::filesystem::path out_dir = "out";  // not echoed into the report

    /// Throws InvalidArgument / WindowOrder when the parameters cannot run.
    void validate() const;
};

/// Identifies the exact bars a report was computed from.
struct DataFingerprint {
    std::string symbol;
    AssetClass asset_class = AssetClass::Stock;
    Interval interval = kDaily;
    std::size_t bar_count = 0;
    Timestamp first;
    Timestamp last;
    std::string content_hash;  // FNV-1a 64 of the canonical bar CSV, hex

    friend bool operator==(const DataFingerprint&, const DataFingerprint&) = default;
};

DataFingerprint fingerprint(const PriceSeries& series);

struct SignalRecord {
    Signal signal;
    SignalOutcome outcome;

    friend bool operator==(const SignalRecord&, const SignalRecord&) = default;
};

/// Self-contained result of one run: the charts are drawn from this alone.
struct BacktestReport {
    DataFingerprint data;
    RunConfig config;
    std::vector<Bar> bars;
    std::vector<IndicatorSeries> indicators;
    std::vector<SignalRecord> signals;
    std::vector<PortfolioSnapshot> snapshots;
    std::vector<Trade> trades;
    MetricsSummary strategy_metrics;
    MetricsSummary baseline_metrics;
    std::vector<std::string> warnings;
};

/// Reads the configured data source, then applies the fraction/range
/// selection. Errors surface as StageError tagged "load".
PriceSeries load_data(const RunConfig& config);

/// indicators -> signals -> backtest + buy-and-hold -> metrics on `series`.
/// `api_vwap` is used instead of a locally computed VWAP when given.
BacktestReport execute(const RunConfig& config, const PriceSeries& series,
                       const std::optional<IndicatorSeries>& api_vwap = std::nullopt);

/// load_data + execute + write_outputs into config.out_dir.
BacktestReport run(const RunConfig& config);

/// report.json plus bars.csv, signals.csv, snapshots.csv and trades.csv.
void write_outputs(const BacktestReport& report, const std::filesystem::path& out_dir);

/// Deterministic JSON: fixed key order, shortest round-trip numbers, no
/// wall-clock data. Top-level keys: meta, config, signals, snapshots,
/// trades, strategy_metrics, baseline_metrics.
std::string report_to_json(const BacktestReport& report);
BacktestReport report_from_json(const std::string& text);
BacktestReport load_report(const std::filesystem::path& path);

inline constexpr std::string_view kSignalCsvHeader = "timestamp,side,trigger_price,strategy";
inline constexpr std::string_view kSnapshotCsvHeader = "timestamp,cash,units,holding_value,total";
inline constexpr std::string_view kTradeCsvHeader = "timestamp,side,price,units,fee_paid";

std::string signals_to_csv(const std::vector<SignalRecord>& signals);
std::string snapshots_to_csv(const std::vector<PortfolioSnapshot>& snapshots);
std::string trades_to_csv(const std::vector<Trade>& trades);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace tradepipe
