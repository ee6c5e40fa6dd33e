#include "tradepipe/report.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tradepipe/error.hpp"

namespace tradepipe {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kToolName = "tradepipe";
constexpr int kReportVersion = 1;

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::UnwritableOutput, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error(ErrorCode::UnwritableOutput, "write failed for '" + path.string() + "'");
}

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    } catch (const std::filesystem::filesystem_error& e) {
        throw StageError(name, Error(ErrorCode::UnwritableOutput, e.what()));
    }
}

ojson optional_number(const std::optional<double>& v) {
    return v ? ojson(*v) : ojson(nullptr);
}

std::optional<double> read_optional(const ojson& v) {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

ojson to_json(const MetricsSummary& m) {
    ojson j;
    j["gross_roi"] = m.gross_roi;
    j["gross_roi_percent"] = m.gross_roi * 100.0;
    j["sharpe"] = optional_number(m.sharpe);
    j["sharpe_error"] = m.sharpe_error.empty() ? ojson(nullptr) : ojson(m.sharpe_error);
    j["periods_per_year"] = m.periods_per_year;
    j["risk_free_rate"] = m.risk_free_rate;
    j["roi_series"] = m.roi_series;
    return j;
}

MetricsSummary metrics_from_json(const ojson& j) {
    MetricsSummary m;
    m.gross_roi = j.at("gross_roi").get<double>();
    m.sharpe = read_optional(j.at("sharpe"));
    if (!j.at("sharpe_error").is_null()) m.sharpe_error = j.at("sharpe_error").get<std::string>();
    m.periods_per_year = j.at("periods_per_year").get<double>();
    m.risk_free_rate = j.at("risk_free_rate").get<double>();
    m.roi_series = j.at("roi_series").get<std::vector<double>>();
    return m;
}

ojson config_to_json(const RunConfig& c) {
    ojson source;
    source["kind"] = to_string(c.source.kind);
    if (c.source.kind == DataSourceKind::Csv) {
        source["path"] = c.source.csv_path.generic_string();
    } else {
        source["api_base"] = c.source.api_base;
    }
    source["symbol"] = c.source.symbol;
    source["asset_class"] = to_string(c.source.asset_class);
    source["interval"] = interval_name(c.source.interval);

    ojson selection;
    selection["fraction"] = optional_number(c.fraction);
    selection["from"] = c.from ? ojson(format_timestamp(*c.from)) : ojson(nullptr);
    selection["to"] = c.to ? ojson(format_timestamp(*c.to)) : ojson(nullptr);

    ojson j;
    j["strategy"] = to_string(c.strategy);
    j["source"] = std::move(source);
    j["selection"] = std::move(selection);
    j["short_window"] = c.short_window;
    j["long_window"] = c.long_window;
    j["session"] = to_string(c.session.mode);
    j["vwap_source"] = to_string(c.vwap_source);
    j["initial_capital"] = c.backtest.initial_capital;
    j["fee_rate"] = c.backtest.fee_rate;
    j["fractional_units"] = c.backtest.fractional_units;
    j["risk_free_rate"] = c.metrics.risk_free_rate;
    j["periods_per_year"] = c.metrics.periods_per_year;
    return j;
}

RunConfig config_from_json(const ojson& j) {
    RunConfig c;
    c.strategy = parse_strategy(j.at("strategy").get<std::string>());
    const auto& source = j.at("source");
    c.source.kind = source.at("kind").get<std::string>() == "Api" ? DataSourceKind::Api
                                                                  : DataSourceKind::Csv;
    if (source.contains("path")) c.source.csv_path = source.at("path").get<std::string>();
    if (source.contains("api_base")) c.source.api_base = source.at("api_base").get<std::string>();
    c.source.symbol = source.at("symbol").get<std::string>();
    c.source.asset_class = parse_asset_class(source.at("asset_class").get<std::string>());
    c.source.interval = parse_interval(source.at("interval").get<std::string>());
    const auto& selection = j.at("selection");
    c.fraction = read_optional(selection.at("fraction"));
    if (!selection.at("from").is_null()) c.from = parse_timestamp(selection.at("from").get<std::string>());
    if (!selection.at("to").is_null()) c.to = parse_timestamp(selection.at("to").get<std::string>());
    c.short_window = j.at("short_window").get<std::size_t>();
    c.long_window = j.at("long_window").get<std::size_t>();
    c.session.mode = parse_session_mode(j.at("session").get<std::string>());
    c.vwap_source = j.at("vwap_source").get<std::string>() == "Api" ? VwapSource::Api : VwapSource::Local;
    c.backtest.initial_capital = j.at("initial_capital").get<double>();
    c.backtest.fee_rate = j.at("fee_rate").get<double>();
    c.backtest.fractional_units = j.at("fractional_units").get<bool>();
    c.metrics.risk_free_rate = j.at("risk_free_rate").get<double>();
    c.metrics.periods_per_year = j.at("periods_per_year").get<double>();
    return c;
}

std::string hex64(std::uint64_t v) {
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(v));
    return buf.data();
}

}  // namespace

std::string_view to_string(DataSourceKind kind) noexcept {
    return kind == DataSourceKind::Csv ? "Csv" : "Api";
}

std::string_view to_string(VwapSource source) noexcept {
    return source == VwapSource::Local ? "Local" : "Api";
}

void RunConfig::validate() const {
    backtest.validate();
    if (!(metrics.periods_per_year > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "periods_per_year must be > 0");
    }
    if (fraction && !(*fraction > 0.0 && *fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fraction must lie in (0, 1]");
    }
    if (source.kind == DataSourceKind::Csv && source.csv_path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "CSV data source needs a path");
    }
    if (source.kind == DataSourceKind::Api && source.symbol.empty()) {
        throw Error(ErrorCode::InvalidArgument, "API data source needs a symbol");
    }
    if (strategy == StrategyKind::MaCrossover) {
        if (short_window == 0 || long_window == 0) {
            throw Error(ErrorCode::WindowZero, "moving average windows must be >= 1");
        }
        if (short_window >= long_window) {
            throw Error(ErrorCode::WindowOrder, "short window " + std::to_string(short_window) +
                                                    " must be smaller than long window " +
                                                    std::to_string(long_window));
        }
    }
    if (vwap_source == VwapSource::Api &&
        (source.kind != DataSourceKind::Api || source.asset_class != AssetClass::Stock)) {
        throw Error(ErrorCode::UnsupportedAsset,
                    "API-provided VWAP needs an API data source for a stock");
    }
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DataFingerprint fingerprint(const PriceSeries& series) {
    std::ostringstream csv;
    write_csv(series, csv);
    return {series.symbol(),           series.asset_class(),
            series.interval(),         series.size(),
            series.front().timestamp,  series.back().timestamp,
            hex64(fnv1a64(csv.str()))};
}

PriceSeries load_data(const RunConfig& config) {
    return stage("load", [&] {
        const auto& src = config.source;
        auto series = [&] {
            if (src.kind == DataSourceKind::Csv) {
                if (!std::filesystem::exists(src.csv_path)) {
                    throw Error(ErrorCode::DataSource,
                                "CSV file '" + src.csv_path.string() + "' does not exist");
                }
                return load_csv(src.csv_path, src.asset_class, src.interval,
                                src.symbol.empty() ? std::nullopt
                                                   : std::optional<std::string>(src.symbol));
            }
            FetchPolicy policy;
            policy.cache_dir = src.cache_dir;
            AlphaVantageClient client(policy, ClientOptions{src.api_base, std::nullopt, "USD"});
            return src.interval >= kDaily
                       ? client.fetch_daily(src.symbol, src.asset_class)
                       : client.fetch_intraday(src.symbol, src.asset_class, src.interval);
        }();
        if (config.from || config.to) series = select_range(series, config.from, config.to);
        if (config.fraction) series = select_fraction(series, *config.fraction);
        return series;
    });
}

BacktestReport execute(const RunConfig& config, const PriceSeries& series,
                       const std::optional<IndicatorSeries>& api_vwap) {
    stage("config", [&] { config.validate(); });

    BacktestReport report;
    report.config = config;
    report.data = fingerprint(series);
    report.bars.assign(series.bars().begin(), series.bars().end());

    std::vector<Signal> signals;
    switch (config.strategy) {
        case StrategyKind::MaCrossover: {
            stage("indicators", [&] {
                report.indicators.push_back(sma(series, config.short_window));
                report.indicators.push_back(sma(series, config.long_window));
            });
            signals = stage("signals", [&] {
                return crossings(report.indicators[0], report.indicators[1],
                                 StrategyKind::MaCrossover);
            });
            // Execution happens at the signal bar's close.
            for (auto& s : signals) s.trigger_price = series[*series.index_of(s.timestamp)].close;
            break;
        }
        case StrategyKind::VwapCross: {
            stage("indicators", [&] {
                report.indicators.push_back(api_vwap ? align_to(series, *api_vwap)
                                                     : vwap(series, config.session));
            });
            signals = stage("signals", [&] {
                return vwap_cross_signals(series, report.indicators[0]);
            });
            break;
        }
        case StrategyKind::BuyHold:
            break;
    }

    const auto baseline = stage("backtest", [&] { return run_buy_and_hold(series, config.backtest); });
    const auto strategy = config.strategy == StrategyKind::BuyHold
                              ? baseline
                              : stage("backtest", [&] {
                                    return run_backtest(series, signals, config.backtest);
                                });

    for (std::size_t k = 0; k < signals.size(); ++k) {
        report.signals.push_back({signals[k], strategy.outcomes[k]});
    }
    report.snapshots = strategy.snapshots;
    report.trades = strategy.trades;
    report.warnings = strategy.warnings;

    std::tie(report.strategy_metrics, report.baseline_metrics) = stage("metrics", [&] {
        return compare(strategy.snapshots, baseline.snapshots, config.backtest.initial_capital,
                       config.metrics);
    });
    return report;
}

BacktestReport run(const RunConfig& config) {
    stage("config", [&] { config.validate(); });
    const auto series = load_data(config);
    std::optional<IndicatorSeries> api_vwap;
    if (config.strategy == StrategyKind::VwapCross && config.vwap_source == VwapSource::Api) {
        api_vwap = stage("load", [&] {
            FetchPolicy policy;
            policy.cache_dir = config.source.cache_dir;
            AlphaVantageClient client(policy, ClientOptions{config.source.api_base, std::nullopt, "USD"});
            return client.fetch_vwap_stock(config.source.symbol, config.source.interval);
        });
    }
    auto report = execute(config, series, api_vwap);
    write_outputs(report, config.out_dir);
    return report;
}

std::string signals_to_csv(const std::vector<SignalRecord>& signals) {
    std::ostringstream out;
    out << kSignalCsvHeader << '\n';
    for (const auto& r : signals) {
        out << format_timestamp(r.signal.timestamp) << ',' << to_string(r.signal.side) << ','
            << format_number(r.signal.trigger_price) << ',' << to_string(r.signal.strategy) << '\n';
    }
    return out.str();
}

std::string snapshots_to_csv(const std::vector<PortfolioSnapshot>& snapshots) {
    std::ostringstream out;
    out << kSnapshotCsvHeader << '\n';
    for (const auto& s : snapshots) {
        out << format_timestamp(s.timestamp) << ',' << format_number(s.cash) << ','
            << format_number(s.units) << ',' << format_number(s.holding_value) << ','
            << format_number(s.total) << '\n';
    }
    return out.str();
}

std::string trades_to_csv(const std::vector<Trade>& trades) {
    std::ostringstream out;
    out << kTradeCsvHeader << '\n';
    for (const auto& t : trades) {
        out << format_timestamp(t.timestamp) << ',' << to_string(t.side) << ','
            << format_number(t.price) << ',' << format_number(t.units) << ','
            << format_number(t.fee_paid) << '\n';
    }
    return out.str();
}

void write_outputs(const BacktestReport& report, const std::filesystem::path& out_dir) {
    stage("output", [&] {
        std::filesystem::create_directories(out_dir);
        write_text(out_dir / "report.json", report_to_json(report));
        const PriceSeries series(report.data.symbol, report.data.asset_class, report.data.interval,
                                 report.bars);
        std::ostringstream bars;
        write_csv(series, bars);
        write_text(out_dir / "bars.csv", bars.str());
        write_text(out_dir / "signals.csv", signals_to_csv(report.signals));
        write_text(out_dir / "snapshots.csv", snapshots_to_csv(report.snapshots));
        write_text(out_dir / "trades.csv", trades_to_csv(report.trades));
    });
}

std::string report_to_json(const BacktestReport& r) {
    ojson data;
    data["symbol"] = r.data.symbol;
    data["asset_class"] = to_string(r.data.asset_class);
    data["interval"] = interval_name(r.data.interval);
    data["bar_count"] = r.data.bar_count;
    data["first"] = format_timestamp(r.data.first);
    data["last"] = format_timestamp(r.data.last);
    data["content_hash"] = r.data.content_hash;

    auto bars = ojson::array();
    for (const auto& b : r.bars) {
        bars.push_back(ojson::array(
            {format_timestamp(b.timestamp), b.open, b.high, b.low, b.close, b.volume}));
    }
    auto indicators = ojson::array();
    for (const auto& ind : r.indicators) {
        auto values = ojson::array();
        for (const auto& p : ind.points) values.push_back(optional_number(p.value));
        indicators.push_back(ojson{{"name", ind.name}, {"values", std::move(values)}});
    }

    ojson meta;
    meta["tool"] = kToolName;
    meta["report_version"] = kReportVersion;
    meta["data"] = std::move(data);
    meta["bar_columns"] = {"timestamp", "open", "high", "low", "close", "volume"};
    meta["bars"] = std::move(bars);
    meta["indicators"] = std::move(indicators);
    meta["warnings"] = r.warnings;

    auto signals = ojson::array();
    for (const auto& s : r.signals) {
        ojson j;
        j["timestamp"] = format_timestamp(s.signal.timestamp);
        j["side"] = to_string(s.signal.side);
        j["trigger_price"] = s.signal.trigger_price;
        j["strategy"] = to_string(s.signal.strategy);
        j["executed"] = s.outcome.trade_index.has_value();
        j["trade_index"] = s.outcome.trade_index ? ojson(*s.outcome.trade_index) : ojson(nullptr);
        j["skip_reason"] = s.outcome.skip ? ojson(to_string(*s.outcome.skip)) : ojson(nullptr);
        signals.push_back(std::move(j));
    }
    auto snapshots = ojson::array();
    for (const auto& s : r.snapshots) {
        snapshots.push_back(ojson{{"timestamp", format_timestamp(s.timestamp)},
                                  {"cash", s.cash},
                                  {"units", s.units},
                                  {"holding_value", s.holding_value},
                                  {"total", s.total}});
    }
    auto trades = ojson::array();
    for (const auto& t : r.trades) {
        trades.push_back(ojson{{"timestamp", format_timestamp(t.timestamp)},
                               {"side", to_string(t.side)},
                               {"price", t.price},
                               {"units", t.units},
                               {"fee_paid", t.fee_paid}});
    }

    ojson doc;
    doc["meta"] = std::move(meta);
    doc["config"] = config_to_json(r.config);
    doc["signals"] = std::move(signals);
    doc["snapshots"] = std::move(snapshots);
    doc["trades"] = std::move(trades);
    doc["strategy_metrics"] = to_json(r.strategy_metrics);
    doc["baseline_metrics"] = to_json(r.baseline_metrics);
    return doc.dump(1) + "\n";
}

BacktestReport report_from_json(const std::string& text) {
    const auto doc = ojson::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::MalformedPayload, "report is not a JSON object");
    }
    try {
        BacktestReport r;
        const auto& meta = doc.at("meta");
        const auto& data = meta.at("data");
        r.data.symbol = data.at("symbol").get<std::string>();
        r.data.asset_class = parse_asset_class(data.at("asset_class").get<std::string>());
        r.data.interval = parse_interval(data.at("interval").get<std::string>());
        r.data.bar_count = data.at("bar_count").get<std::size_t>();
        r.data.first = parse_timestamp(data.at("first").get<std::string>());
        r.data.last = parse_timestamp(data.at("last").get<std::string>());
        r.data.content_hash = data.at("content_hash").get<std::string>();

        for (const auto& b : meta.at("bars")) {
            r.bars.push_back({parse_timestamp(b.at(0).get<std::string>()), b.at(1).get<double>(),
                              b.at(2).get<double>(), b.at(3).get<double>(), b.at(4).get<double>(),
                              b.at(5).get<double>()});
        }
        if (r.bars.size() != r.data.bar_count) {
            throw Error(ErrorCode::MalformedPayload, "bar count does not match fingerprint");
        }
        for (const auto& ind : meta.at("indicators")) {
            IndicatorSeries s{ind.at("name").get<std::string>(), {}};
            const auto& values = ind.at("values");
            if (values.size() != r.bars.size()) {
                throw Error(ErrorCode::MalformedPayload, "indicator '" + s.name + "' is misaligned");
            }
            for (std::size_t i = 0; i < values.size(); ++i) {
                s.points.push_back({r.bars[i].timestamp, read_optional(values[i])});
            }
            r.indicators.push_back(std::move(s));
        }
        r.warnings = meta.at("warnings").get<std::vector<std::string>>();
        r.config = config_from_json(doc.at("config"));

        for (const auto& j : doc.at("signals")) {
            SignalRecord s;
            s.signal.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
            s.signal.side = parse_side(j.at("side").get<std::string>());
            s.signal.trigger_price = j.at("trigger_price").get<double>();
            s.signal.strategy = parse_strategy(j.at("strategy").get<std::string>());
            if (!j.at("trade_index").is_null()) s.outcome.trade_index = j.at("trade_index").get<std::size_t>();
            if (!j.at("skip_reason").is_null()) {
                s.outcome.skip = parse_skip_reason(j.at("skip_reason").get<std::string>());
            }
            r.signals.push_back(s);
        }
        for (const auto& j : doc.at("snapshots")) {
            r.snapshots.push_back({parse_timestamp(j.at("timestamp").get<std::string>()),
                                   j.at("cash").get<double>(), j.at("units").get<double>(),
                                   j.at("holding_value").get<double>(), j.at("total").get<double>()});
        }
        for (const auto& j : doc.at("trades")) {
            r.trades.push_back({parse_timestamp(j.at("timestamp").get<std::string>()),
                                parse_side(j.at("side").get<std::string>()), j.at("price").get<double>(),
                                j.at("units").get<double>(), j.at("fee_paid").get<double>()});
        }
        r.strategy_metrics = metrics_from_json(doc.at("strategy_metrics"));
        r.baseline_metrics = metrics_from_json(doc.at("baseline_metrics"));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedPayload, std::string("report JSON: ") + e.what());
    }
}

BacktestReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return report_from_json(text.str());
}

}  // namespace tradepipe
