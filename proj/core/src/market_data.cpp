#include "tradepipe/market_data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "tradepipe/error.hpp"

namespace tradepipe {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

bool on_grid(Timestamp ts, Interval interval) {
    return interval.count() > 0 && ts.time_since_epoch().count() % interval.count() == 0;
}

}  // namespace

std::string_view to_string(AssetClass asset) noexcept {
    return asset == AssetClass::Stock ? "Stock" : "Crypto";
}

AssetClass parse_asset_class(std::string_view text) {
    const auto t = lower(text);
    if (t == "stock") return AssetClass::Stock;
    if (t == "crypto") return AssetClass::Crypto;
    throw Error(ErrorCode::InvalidArgument, "unknown asset class '" + std::string(text) + "'");
}

std::optional<std::string> bar_violation(const Bar& bar) {
    for (double p : {bar.open, bar.high, bar.low, bar.close}) {
        if (!std::isfinite(p) || p <= 0.0) return "prices must be finite and > 0";
    }
    if (!std::isfinite(bar.volume) || bar.volume < 0.0) return "volume must be finite and >= 0";
    if (bar.low > std::min(bar.open, bar.close)) return "low exceeds min(open, close)";
    if (bar.high < std::max(bar.open, bar.close)) return "high below max(open, close)";
    return std::nullopt;
}

PriceSeries::PriceSeries(std::string symbol, AssetClass asset_class, Interval interval,
                         std::vector<Bar> bars)
    : symbol_(std::move(symbol)),
      asset_class_(asset_class),
      interval_(interval),
      bars_(std::move(bars)) {
    if (interval_.count() <= 0) {
        throw Error(ErrorCode::InvalidArgument, "interval must be positive");
    }
    if (bars_.empty()) throw Error(ErrorCode::EmptySeries, "series '" + symbol_ + "' has no bars");
    for (std::size_t i = 0; i < bars_.size(); ++i) {
        const Bar& bar = bars_[i];
        if (auto why = bar_violation(bar)) {
            throw Error(ErrorCode::InvalidArgument,
                        "bar " + std::to_string(i) + " (" + format_timestamp(bar.timestamp) +
                            "): " + *why);
        }
        if (!on_grid(bar.timestamp, interval_)) {
            throw Error(ErrorCode::InvalidArgument,
                        "bar " + std::to_string(i) + " (" + format_timestamp(bar.timestamp) +
                            ") is not aligned to the " + interval_name(interval_) + " grid");
        }
        if (i > 0 && bars_[i - 1].timestamp >= bar.timestamp) {
            throw Error(bars_[i - 1].timestamp == bar.timestamp ? ErrorCode::DuplicateTimestamp
                                                                : ErrorCode::InvalidArgument,
                        "timestamps not strictly increasing at bar " + std::to_string(i));
        }
    }
}

std::vector<double> PriceSeries::closes() const {
    std::vector<double> out;
    out.reserve(bars_.size());
    for (const auto& bar : bars_) out.push_back(bar.close);
    return out;
}

std::optional<std::size_t> PriceSeries::index_of(Timestamp ts) const {
    const auto it = std::lower_bound(bars_.begin(), bars_.end(), ts,
                                     [](const Bar& b, Timestamp t) { return b.timestamp < t; });
    if (it == bars_.end() || it->timestamp != ts) return std::nullopt;
    return static_cast<std::size_t>(it - bars_.begin());
}

PriceSeries PriceSeries::slice(std::size_t first, std::size_t last) const {
    last = std::min(last, bars_.size());
    if (first >= last) throw Error(ErrorCode::EmptySeries, "empty slice of '" + symbol_ + "'");
    return PriceSeries(symbol_, asset_class_, interval_,
                       std::vector<Bar>(bars_.begin() + static_cast<std::ptrdiff_t>(first),
                                        bars_.begin() + static_cast<std::ptrdiff_t>(last)));
}

PriceSeries parse_csv(std::istream& in, std::string symbol, AssetClass asset_class,
                      Interval interval) {
    std::string line;
    std::size_t line_no = 0;
    // Skip leading blank lines before the header.
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw Error(ErrorCode::EmptySeries, "CSV has no header");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_fields(line);
    auto find_column = [&](std::initializer_list<std::string_view> names) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            const auto h = lower(header[i]);
            for (auto name : names) {
                if (h == name) return i;
            }
        }
        throw Error(ErrorCode::MissingColumn,
                    "CSV header lacks a '" + std::string(*names.begin()) + "' column");
    };
    const std::array<std::size_t, 6> col{
        find_column({"timestamp", "date", "datetime", "time"}),
        find_column({"open"}),
        find_column({"high"}),
        find_column({"low"}),
        find_column({"close"}),
        find_column({"volume"}),
    };
    const std::size_t needed = *std::max_element(col.begin(), col.end()) + 1;

    struct Row {
        Bar bar;
        std::size_t line;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() < needed) throw RowError(line_no, "too few fields");

        Bar bar;
        try {
            bar.timestamp = parse_timestamp(fields[col[0]]);
        } catch (const Error& e) {
            throw RowError(line_no, e.detail());
        }
        if (!on_grid(bar.timestamp, interval)) {
            throw RowError(line_no, "timestamp not aligned to the " + interval_name(interval) +
                                        " grid");
        }
        double* targets[] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.volume};
        for (std::size_t k = 0; k < 5; ++k) {
            const auto v = parse_double(fields[col[k + 1]]);
            if (!v) {
                throw RowError(line_no, "bad number '" + std::string(fields[col[k + 1]]) + "'");
            }
            *targets[k] = *v;
        }
        if (auto why = bar_violation(bar)) throw RowError(line_no, *why);
        rows.push_back({bar, line_no});
    }
    if (rows.empty()) throw Error(ErrorCode::EmptySeries, "CSV for '" + symbol + "' has no rows");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.bar.timestamp < b.bar.timestamp;
    });
    std::vector<Bar> bars;
    bars.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].bar.timestamp == rows[i - 1].bar.timestamp) {
            throw Error(ErrorCode::DuplicateTimestamp,
                        format_timestamp(rows[i].bar.timestamp) + " appears on lines " +
                            std::to_string(std::min(rows[i - 1].line, rows[i].line)) + " and " +
                            std::to_string(std::max(rows[i - 1].line, rows[i].line)));
        }
        bars.push_back(rows[i].bar);
    }
    return PriceSeries(std::move(symbol), asset_class, interval, std::move(bars));
}

PriceSeries load_csv(const std::filesystem::path& path, AssetClass asset_class,
                     Interval interval, std::optional<std::string> symbol) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    return parse_csv(in, symbol ? *symbol : path.stem().string(), asset_class, interval);
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

void write_csv(const PriceSeries& series, std::ostream& out) {
    out << kBarCsvHeader << '\n';
    for (const auto& bar : series.bars()) {
        out << format_timestamp(bar.timestamp) << ',' << format_number(bar.open) << ','
            << format_number(bar.high) << ',' << format_number(bar.low) << ','
            << format_number(bar.close) << ',' << format_number(bar.volume) << '\n';
    }
}

void save_csv(const PriceSeries& series, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::UnwritableOutput, "cannot write '" + path.string() + "'");
    write_csv(series, out);
    if (!out) throw Error(ErrorCode::UnwritableOutput, "write failed for '" + path.string() + "'");
}

PriceSeries select_fraction(const PriceSeries& series, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fraction must lie in (0, 1]");
    }
    const auto n = series.size();
    auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    keep = std::clamp<std::size_t>(keep, 1, n);
    return series.slice(n - keep, n);
}

PriceSeries select_range(const PriceSeries& series, std::optional<Timestamp> from,
                         std::optional<Timestamp> to) {
    std::size_t first = 0;
    std::size_t last = series.size();
    const auto bars = series.bars();
    if (from) {
        first = static_cast<std::size_t>(
            std::lower_bound(bars.begin(), bars.end(), *from,
                             [](const Bar& b, Timestamp t) { return b.timestamp < t; }) -
            bars.begin());
    }
    if (to) {
        last = static_cast<std::size_t>(
            std::upper_bound(bars.begin(), bars.end(), *to,
                             [](Timestamp t, const Bar& b) { return t < b.timestamp; }) -
            bars.begin());
    }
    if (first >= last) throw Error(ErrorCode::EmptySeries, "no bars inside the selected window");
    return series.slice(first, last);
}

}  // namespace tradepipe
