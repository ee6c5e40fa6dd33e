#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tradepipe/time.hpp"

namespace tradepipe {

enum class AssetClass { Stock, Crypto };

std::string_view to_string(AssetClass asset) noexcept;
AssetClass parse_asset_class(std::string_view text);

/// One OHLCV observation. Prices are in the quote currency (USD), volume in
/// asset units.
struct Bar {
    Timestamp timestamp;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

/// Returns a description of the first violated bar invariant, or nullopt
/// when the bar is valid (finite positive prices, non-negative volume,
/// low <= min(open, close), high >= max(open, close)).
std::optional<std::string> bar_violation(const Bar& bar);

/// Immutable, validated, time-ordered bars for one symbol at one interval.
///
/// Construction enforces: at least one bar, every bar valid, timestamps
/// strictly increasing and aligned to the interval grid (multiples of the
/// interval since the epoch, so daily bars sit on UTC midnight). Gaps are
/// allowed. Throws Error on violation.
class PriceSeries {
public:
    PriceSeries(std::string symbol, AssetClass asset_class, Interval interval,
                std::vector<Bar> bars);

    const std::string& symbol() const noexcept { return symbol_; }
    AssetClass asset_class() const noexcept { return asset_class_; }
    Interval interval() const noexcept { return interval_; }
    std::span<const Bar> bars() const noexcept { return bars_; }
    std::size_t size() const noexcept { return bars_.size(); }
    const Bar& operator[](std::size_t i) const { return bars_[i]; }
    const Bar& front() const { return bars_.front(); }
    const Bar& back() const { return bars_.back(); }

    std::vector<double> closes() const;

    /// Index of the bar stamped exactly `ts`, if any.
    std::optional<std::size_t> index_of(Timestamp ts) const;

    /// Bars [first, last) as a new series.
    PriceSeries slice(std::size_t first, std::size_t last) const;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    std::string symbol_;
    AssetClass asset_class_;
    Interval interval_;
    std::vector<Bar> bars_;
};

/// Exact header emitted by write_csv.
inline constexpr std::string_view kBarCsvHeader = "timestamp,open,high,low,close,volume";

/// Parses OHLCV CSV text. The header must name timestamp (or date), open,
/// high, low, close and volume in any order and case; extra columns are
/// ignored. Rows may be out of order and are sorted ascending. Errors:
/// MissingColumn, UnparseableRow (with the physical line number),
/// EmptySeries, DuplicateTimestamp.
PriceSeries parse_csv(std::istream& in, std::string symbol, AssetClass asset_class,
                      Interval interval);

/// parse_csv on a file. The symbol defaults to the file stem.
PriceSeries load_csv(const std::filesystem::path& path, AssetClass asset_class,
                     Interval interval, std::optional<std::string> symbol = std::nullopt);

/// Canonical CSV: kBarCsvHeader, RFC 3339 UTC timestamps, shortest
/// round-trip decimal numbers. parse_csv(write_csv(s)) == s.
void write_csv(const PriceSeries& series, std::ostream& out);
void save_csv(const PriceSeries& series, const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

/// Keeps the trailing `fraction` (0, 1] of the bars, rounding the bar count
/// up so at least one bar survives.
PriceSeries select_fraction(const PriceSeries& series, double fraction);

/// Keeps bars with from <= timestamp <= to. Throws EmptySeries if none do.
PriceSeries select_range(const PriceSeries& series, std::optional<Timestamp> from,
                         std::optional<Timestamp> to);

}  // namespace tradepipe
