#include "cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tradepipe/alpha_vantage.hpp"
#include "tradepipe/error.hpp"
#include "tradepipe/render.hpp"
#include "tradepipe/report.hpp"

namespace tradepipe::cli {

namespace {

struct FetchArgs {
    std::string symbol;
    std::string asset;
    std::string interval = "daily";
    bool vwap = false;
    std::string out;
    std::string cache_dir = ".tradepipe-cache";
    std::string api_base = kDefaultApiBase;
    std::size_t per_minute = 5;
    std::size_t per_day = 500;
};

struct BacktestArgs {
    std::string csv;
    std::string symbol;
    std::string asset;
    std::string interval = "daily";
    std::string strategy = "ma";
    std::size_t short_window = 50;
    std::size_t long_window = 200;
    std::string session = "daily";
    std::string vwap_source = "local";
    double fee = 0.001;
    double capital = 10'000.0;
    std::string units = "auto";
    double risk_free = 0.0;
    double periods_per_year = 0.0;
    double fraction = 0.0;
    std::string from;
    std::string to;
    std::string out = "out";
    std::string cache_dir = ".tradepipe-cache";
    std::string api_base = kDefaultApiBase;
    bool no_charts = false;
};

struct ReportArgs {
    std::string in;
    std::string out;
};

AssetClass resolve_asset(const std::string& flag, const std::string& symbol) {
    if (!flag.empty()) return parse_asset_class(flag);
    return is_crypto_symbol(symbol) ? AssetClass::Crypto : AssetClass::Stock;
}

int do_fetch(const FetchArgs& a, std::ostream& out) {
    FetchPolicy policy;
    policy.max_requests_per_minute = a.per_minute;
    policy.max_requests_per_day = a.per_day;
    policy.cache_dir = a.cache_dir;
    AlphaVantageClient client(policy, ClientOptions{a.api_base, std::nullopt, "USD"});

    const auto asset = resolve_asset(a.asset, a.symbol);
    const auto interval = parse_interval(a.interval);
    const auto target = a.out.empty() ? a.symbol + (a.vwap ? "_vwap" : "") + ".csv" : a.out;

    try {
        if (a.vwap) {
            const auto vwap = client.fetch_vwap_stock(a.symbol, interval);
            std::ofstream file(target, std::ios::binary | std::ios::trunc);
            if (!file) throw Error(ErrorCode::UnwritableOutput, "cannot write '" + target + "'");
            file << indicator_to_csv(vwap);
            out << "wrote " << vwap.size() << " VWAP points to " << target << '\n';
        } else {
            const auto series = interval >= kDaily ? client.fetch_daily(a.symbol, asset)
                                                   : client.fetch_intraday(a.symbol, asset, interval);
            save_csv(series, target);
            out << "wrote " << series.size() << " bars to " << target << '\n';
        }
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError("fetch", e);
    }
    out << "HTTP requests issued: " << client.requests_issued() << '\n';
    return 0;
}

RunConfig to_run_config(const BacktestArgs& a) {
    RunConfig c;
    c.strategy = parse_strategy(a.strategy);
    if (!a.csv.empty()) {
        c.source.kind = DataSourceKind::Csv;
        c.source.csv_path = a.csv;
        c.source.symbol = a.symbol;
    } else {
        c.source.kind = DataSourceKind::Api;
        c.source.symbol = a.symbol;
    }
    const auto symbol_hint =
        a.symbol.empty() ? std::filesystem::path(a.csv).stem().string() : a.symbol;
    c.source.asset_class = resolve_asset(a.asset, symbol_hint);
    c.source.interval = parse_interval(a.interval);
    c.source.api_base = a.api_base;
    c.source.cache_dir = a.cache_dir;

    c.short_window = a.short_window;
    c.long_window = a.long_window;
    c.session.mode = parse_session_mode(a.session);
    if (a.vwap_source == "api") {
        c.vwap_source = VwapSource::Api;
    } else if (a.vwap_source != "local") {
        throw Error(ErrorCode::InvalidArgument, "--vwap-source must be local or api");
    }

    c.backtest = BacktestConfig::for_asset(c.source.asset_class);
    c.backtest.fee_rate = a.fee;
    c.backtest.initial_capital = a.capital;
    if (a.units == "fractional") {
        c.backtest.fractional_units = true;
    } else if (a.units == "integer") {
        c.backtest.fractional_units = false;
    } else if (a.units != "auto") {
        throw Error(ErrorCode::InvalidArgument, "--units must be auto, fractional or integer");
    }

    c.metrics = MetricsParams::defaults_for(c.source.asset_class, c.source.interval);
    c.metrics.risk_free_rate = a.risk_free;
    if (a.periods_per_year > 0.0) c.metrics.periods_per_year = a.periods_per_year;
    if (a.fraction > 0.0) c.fraction = a.fraction;
    if (!a.from.empty()) c.from = parse_timestamp(a.from);
    if (!a.to.empty()) c.to = parse_timestamp(a.to);
    c.out_dir = a.out;
    return c;
}

int do_backtest(const BacktestArgs& a, std::ostream& out) {
    const auto config = [&] {
        try {
            return to_run_config(a);
        } catch (const Error& e) {
            throw StageError("config", e);
        }
    }();
    const auto report = run(config);
    if (!a.no_charts) {
        try {
            render(report, config.out_dir);
        } catch (const Error& e) {
            throw StageError("render", e);
        }
    }
    auto sharpe_text = [](const MetricsSummary& m) {
        std::ostringstream s;
        if (m.sharpe) {
            s << *m.sharpe;
        } else {
            s << "n/a (" << m.sharpe_error << ")";
        }
        return s.str();
    };
    out << report.data.symbol << ": " << report.data.bar_count << " bars, "
        << report.signals.size() << " signals, " << report.trades.size() << " trades\n";
    out << "strategy   gross ROI " << report.strategy_metrics.gross_roi * 100.0 << "%  Sharpe "
        << sharpe_text(report.strategy_metrics) << '\n';
    out << "buy & hold gross ROI " << report.baseline_metrics.gross_roi * 100.0 << "%  Sharpe "
        << sharpe_text(report.baseline_metrics) << '\n';
    out << "outputs in " << config.out_dir.string() << '\n';
    return 0;
}

int do_report(const ReportArgs& a, std::ostream& out) {
    const auto report = [&] {
        try {
            return load_report(a.in);
        } catch (const Error& e) {
            throw StageError("load", e);
        }
    }();
    try {
        for (const auto& path : render(report, a.out)) out << "wrote " << path.string() << '\n';
    } catch (const Error& e) {
        throw StageError("render", e);
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deterministic SMA/VWAP backtesting pipeline", "tradepipe"};
    app.require_subcommand(1);

    FetchArgs fetch;
    auto* fetch_cmd = app.add_subcommand("fetch", "Download a price series (or stock VWAP) to CSV");
    fetch_cmd->add_option("--symbol", fetch.symbol, "Ticker, e.g. AAPL or ETH")->required();
    fetch_cmd->add_option("--asset", fetch.asset, "stock or crypto (default: inferred from symbol)");
    fetch_cmd->add_option("--interval", fetch.interval, "daily or <n>min")->capture_default_str();
    fetch_cmd->add_flag("--vwap", fetch.vwap, "Fetch the API's VWAP indicator (stocks only)");
    fetch_cmd->add_option("--out", fetch.out, "Output CSV path (default: <symbol>.csv)");
    fetch_cmd->add_option("--cache-dir", fetch.cache_dir)->capture_default_str();
    fetch_cmd->add_option("--api-base", fetch.api_base)->capture_default_str();
    fetch_cmd->add_option("--per-minute", fetch.per_minute, "Request budget per minute")
        ->capture_default_str();
    fetch_cmd->add_option("--per-day", fetch.per_day, "Request budget per UTC day")
        ->capture_default_str();

    BacktestArgs bt;
    auto* bt_cmd = app.add_subcommand("backtest", "Run the pipeline and write report, CSVs and charts");
    auto* csv_opt = bt_cmd->add_option("--csv", bt.csv, "OHLCV CSV input");
    auto* sym_opt = bt_cmd->add_option("--symbol", bt.symbol, "Ticker (fetches from the API without --csv)");
    bt_cmd->add_option("--asset", bt.asset, "stock or crypto (default: inferred from symbol)");
    bt_cmd->add_option("--interval", bt.interval, "daily or <n>min")->capture_default_str();
    bt_cmd->add_option("--strategy", bt.strategy, "ma, vwap or buyhold")->capture_default_str();
    bt_cmd->add_option("--short", bt.short_window, "Short SMA window")->capture_default_str();
    bt_cmd->add_option("--long", bt.long_window, "Long SMA window")->capture_default_str();
    bt_cmd->add_option("--session", bt.session, "VWAP session: daily or cumulative")
        ->capture_default_str();
    bt_cmd->add_option("--vwap-source", bt.vwap_source, "local or api")->capture_default_str();
    bt_cmd->add_option("--fee", bt.fee, "Fee rate per transaction")->capture_default_str();
    bt_cmd->add_option("--capital", bt.capital, "Initial capital (USD)")->capture_default_str();
    bt_cmd->add_option("--units", bt.units, "auto, fractional or integer")->capture_default_str();
    bt_cmd->add_option("--rf", bt.risk_free, "Annual risk-free rate")->capture_default_str();
    bt_cmd->add_option("--periods-per-year", bt.periods_per_year,
                       "Sharpe annualization (default: by asset and interval)");
    bt_cmd->add_option("--fraction", bt.fraction, "Keep the trailing fraction of bars (0, 1]");
    bt_cmd->add_option("--from", bt.from, "First timestamp to keep");
    bt_cmd->add_option("--to", bt.to, "Last timestamp to keep");
    bt_cmd->add_option("--out", bt.out, "Output directory")->capture_default_str();
    bt_cmd->add_option("--cache-dir", bt.cache_dir)->capture_default_str();
    bt_cmd->add_option("--api-base", bt.api_base)->capture_default_str();
    bt_cmd->add_flag("--no-charts", bt.no_charts, "Skip chart rendering");
    csv_opt->excludes(sym_opt);
    bt_cmd->callback([&] {
        if (bt.csv.empty() && bt.symbol.empty()) {
            throw CLI::RequiredError("--csv or --symbol");
        }
    });

    ReportArgs rep;
    auto* rep_cmd = app.add_subcommand("report", "Re-render charts from an existing report.json");
    rep_cmd->add_option("--in", rep.in, "report.json")->required();
    rep_cmd->add_option("--out", rep.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fetch_cmd) return do_fetch(fetch, out);
        if (*bt_cmd) return do_backtest(bt, out);
        if (*rep_cmd) return do_report(rep, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace tradepipe::cli
