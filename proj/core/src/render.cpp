#include "tradepipe/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "tradepipe/error.hpp"

namespace tradepipe {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 30.0;
constexpr double kTop = 56.0;
constexpr double kBottom = 64.0;
constexpr int kYTicks = 5;
constexpr int kXTicks = 6;

std::string num(double v, int decimals = 2) {
    // Avoid "-0.00" so identical geometry always prints identically.
    const double scale = std::pow(10.0, decimals);
    if (std::fabs(v) * scale < 0.5) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", std::fabs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Line {
    std::string name;
    std::string color;
    std::vector<std::optional<double>> values;
    double width = 1.5;
};

struct Marker {
    std::size_t index;
    double value;
    bool up;
};

class Chart {
public:
    Chart(std::string title, std::string y_label) : title_(std::move(title)), y_label_(std::move(y_label)) {}

    void set_x_labels(std::vector<std::string> labels) { x_labels_ = std::move(labels); }
    void add_line(Line line) { lines_.push_back(std::move(line)); }
    void add_marker(Marker m) { markers_.push_back(m); }
    void add_note(std::string note) { notes_.push_back(std::move(note)); }

    std::string svg() {
        compute_range();
        std::ostringstream out;
        header(out);
        axes(out);
        for (const auto& line : lines_) polyline(out, line);
        for (const auto& m : markers_) marker(out, m);
        legend(out);
        out << "</svg>\n";
        return out.str();
    }

private:
    double plot_w() const { return kWidth - kLeft - kRight; }
    double plot_h() const { return kHeight - kTop - kBottom; }

    double x_of(std::size_t i) const {
        const auto n = x_labels_.size();
        if (n <= 1) return kLeft + plot_w() / 2.0;
        return kLeft + plot_w() * static_cast<double>(i) / static_cast<double>(n - 1);
    }

    double y_of(double v) const { return kTop + plot_h() * (hi_ - v) / (hi_ - lo_); }

    void compute_range() {
        bool any = false;
        auto take = [&](double v) {
            if (!std::isfinite(v)) return;
            lo_ = any ? std::min(lo_, v) : v;
            hi_ = any ? std::max(hi_, v) : v;
            any = true;
        };
        for (const auto& line : lines_) {
            for (const auto& v : line.values) {
                if (v) take(*v);
            }
        }
        for (const auto& m : markers_) take(m.value);
        if (!any) {
            lo_ = 0.0;
            hi_ = 1.0;
        }
        const double span = hi_ - lo_;
        const double pad = span > 0.0 ? span * 0.05 : std::max(std::fabs(hi_) * 0.05, 1.0);
        lo_ -= pad;
        hi_ += pad;
    }

    void header(std::ostringstream& out) const {
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth, 0)
            << "\" height=\"" << num(kHeight, 0) << "\" viewBox=\"0 0 " << num(kWidth, 0) << ' '
            << num(kHeight, 0) << "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
        out << "<text x=\"" << num(kWidth / 2.0) << "\" y=\"30\" text-anchor=\"middle\" "
            << "font-size=\"18\" font-weight=\"bold\">" << escape(title_) << "</text>\n";
    }

    void axes(std::ostringstream& out) const {
        out << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
        for (int k = 0; k <= kYTicks; ++k) {
            const double v = lo_ + (hi_ - lo_) * k / kYTicks;
            out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y_of(v)) << "\" x2=\""
                << num(kLeft + plot_w()) << "\" y2=\"" << num(y_of(v)) << "\"/>\n";
        }
        out << "</g>\n";
        out << "<g font-size=\"11\" fill=\"#333333\">\n";
        for (int k = 0; k <= kYTicks; ++k) {
            const double v = lo_ + (hi_ - lo_) * k / kYTicks;
            out << "<text x=\"" << num(kLeft - 8.0) << "\" y=\"" << num(y_of(v) + 4.0)
                << "\" text-anchor=\"end\">" << label(v) << "</text>\n";
        }
        const auto n = x_labels_.size();
        if (n > 0) {
            const std::size_t ticks = std::min<std::size_t>(kXTicks, n);
            for (std::size_t k = 0; k < ticks; ++k) {
                const std::size_t i = ticks == 1 ? 0 : k * (n - 1) / (ticks - 1);
                out << "<text x=\"" << num(x_of(i)) << "\" y=\"" << num(kTop + plot_h() + 20.0)
                    << "\" text-anchor=\"middle\">" << escape(x_labels_[i]) << "</text>\n";
            }
        }
        out << "<text x=\"20\" y=\"" << num(kTop + plot_h() / 2.0)
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << num(kTop + plot_h() / 2.0)
            << ")\">" << escape(y_label_) << "</text>\n";
        out << "</g>\n";
        out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w())
            << "\" height=\"" << num(plot_h()) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    }

    void polyline(std::ostringstream& out, const Line& line) const {
        // Absent values split the line into separate segments.
        std::string points;
        std::size_t count = 0;
        auto flush = [&] {
            if (count > 0) {
                out << "<polyline fill=\"none\" stroke=\"" << line.color << "\" stroke-width=\""
                    << num(line.width, 1) << "\" points=\"" << points << "\"/>\n";
            }
            points.clear();
            count = 0;
        };
        for (std::size_t i = 0; i < line.values.size(); ++i) {
            const auto& v = line.values[i];
            if (!v || !std::isfinite(*v)) {
                flush();
                continue;
            }
            if (count > 0) points.push_back(' ');
            points += num(x_of(i)) + "," + num(y_of(*v));
            ++count;
        }
        flush();
    }

    void marker(std::ostringstream& out, const Marker& m) const {
        const double x = x_of(m.index);
        const double y = y_of(m.value);
        const double s = 7.0;
        if (m.up) {
            out << "<polygon class=\"marker buy\" fill=\"#1a9850\" points=\"" << num(x) << ',' << num(y - s) << ' '
                << num(x - s) << ',' << num(y + s) << ' ' << num(x + s) << ',' << num(y + s)
                << "\"/>\n";
        } else {
            out << "<polygon class=\"marker sell\" fill=\"#d73027\" points=\"" << num(x) << ',' << num(y + s) << ' '
                << num(x - s) << ',' << num(y - s) << ' ' << num(x + s) << ',' << num(y - s)
                << "\"/>\n";
        }
    }

    void legend(std::ostringstream& out) const {
        double y = kTop + 16.0;
        out << "<g font-size=\"12\">\n";
        for (const auto& line : lines_) {
            out << "<line x1=\"" << num(kLeft + 12.0) << "\" y1=\"" << num(y - 4.0) << "\" x2=\""
                << num(kLeft + 36.0) << "\" y2=\"" << num(y - 4.0) << "\" stroke=\"" << line.color
                << "\" stroke-width=\"3\"/>\n";
            out << "<text x=\"" << num(kLeft + 42.0) << "\" y=\"" << num(y) << "\">"
                << escape(line.name) << "</text>\n";
            y += 18.0;
        }
        for (const auto& note : notes_) {
            out << "<text x=\"" << num(kLeft + 12.0) << "\" y=\"" << num(y) << "\">" << escape(note)
                << "</text>\n";
            y += 18.0;
        }
        out << "</g>\n";
    }

    std::string title_;
    std::string y_label_;
    std::vector<std::string> x_labels_;
    std::vector<Line> lines_;
    std::vector<Marker> markers_;
    std::vector<std::string> notes_;
    double lo_ = 0.0;
    double hi_ = 1.0;
};

std::vector<std::string> time_labels(const BacktestReport& r) {
    std::vector<std::string> out;
    out.reserve(r.bars.size());
    const bool daily = r.data.interval >= kDaily;
    for (const auto& b : r.bars) {
        auto s = format_timestamp(b.timestamp);  // YYYY-MM-DDTHH:MM:SSZ
        out.push_back(daily ? s.substr(0, 10) : s.substr(5, 5) + " " + s.substr(11, 5));
    }
    return out;
}

std::vector<std::optional<double>> present(const std::vector<double>& xs, double scale = 1.0) {
    std::vector<std::optional<double>> out;
    out.reserve(xs.size());
    for (double x : xs) out.emplace_back(x * scale);
    return out;
}

std::string strategy_title(const BacktestReport& r) {
    switch (r.config.strategy) {
        case StrategyKind::MaCrossover:
            return "moving average crossover (" + std::to_string(r.config.short_window) + "/" +
                   std::to_string(r.config.long_window) + ")";
        case StrategyKind::VwapCross: return "volume-weighted average price";
        case StrategyKind::BuyHold: return "buy-and-hold";
    }
    return "";
}

std::string percent(double fraction) { return num(fraction * 100.0, 2) + "%"; }

std::string signals_chart(const BacktestReport& r) {
    Chart chart("Buy-and-Sell Signals: " + r.data.symbol + " " + strategy_title(r), "Price (USD)");
    chart.set_x_labels(time_labels(r));
    std::vector<std::optional<double>> close;
    for (const auto& b : r.bars) close.emplace_back(b.close);
    chart.add_line({"Close", "#000000", std::move(close), 1.5});
    static const char* kColors[] = {"#4575b4", "#f46d43", "#74add1", "#fdae61"};
    for (std::size_t k = 0; k < r.indicators.size(); ++k) {
        std::vector<std::optional<double>> values;
        for (const auto& p : r.indicators[k].points) values.push_back(p.value);
        chart.add_line({r.indicators[k].name, kColors[k % 4], std::move(values), 1.5});
    }
    for (const auto& s : r.signals) {
        const auto it = std::lower_bound(
            r.bars.begin(), r.bars.end(), s.signal.timestamp,
            [](const Bar& b, Timestamp t) { return b.timestamp < t; });
        if (it == r.bars.end() || it->timestamp != s.signal.timestamp) continue;
        chart.add_marker({static_cast<std::size_t>(it - r.bars.begin()), s.signal.trigger_price,
                          s.signal.side == Side::Buy});
    }
    chart.add_note(std::to_string(r.signals.size()) + " signals, " +
                   std::to_string(r.trades.size()) + " trades");
    return chart.svg();
}

std::string portfolio_chart(const BacktestReport& r) {
    Chart chart("Portfolio Time Series: " + r.data.symbol + " " + strategy_title(r), "Value (USD)");
    chart.set_x_labels(time_labels(r));
    std::vector<std::optional<double>> cash;
    std::vector<std::optional<double>> holding;
    std::vector<std::optional<double>> total;
    for (const auto& s : r.snapshots) {
        cash.emplace_back(s.cash);
        holding.emplace_back(s.holding_value);
        total.emplace_back(s.total);
    }
    chart.add_line({"Cash", "#d73027", std::move(cash), 1.5});
    chart.add_line({"Holdings", "#1a9850", std::move(holding), 1.5});
    chart.add_line({"Total", "#4575b4", std::move(total), 2.0});
    return chart.svg();
}

std::string roi_chart(const BacktestReport& r) {
    Chart chart("Gross ROI: " + strategy_title(r) + " vs. buy-and-hold", "ROI (%)");
    chart.set_x_labels(time_labels(r));
    chart.add_line({"Strategy", "#4575b4", present(r.strategy_metrics.roi_series, 100.0), 2.0});
    chart.add_line({"Buy & hold", "#000000", present(r.baseline_metrics.roi_series, 100.0), 1.5});
    chart.add_note("Strategy ROI: " + percent(r.strategy_metrics.gross_roi));
    chart.add_note("Buy & hold ROI: " + percent(r.baseline_metrics.gross_roi));
    return chart.svg();
}

std::string sharpe_value(const MetricsSummary& m) {
    return m.sharpe ? num(*m.sharpe, 2) : "n/a (" + m.sharpe_error + ")";
}

std::string sharpe_chart(const BacktestReport& r) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth, 0) << "\" height=\""
        << num(kHeight, 0) << "\" viewBox=\"0 0 " << num(kWidth, 0) << ' ' << num(kHeight, 0)
        << "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << num(kWidth / 2.0) << "\" y=\"30\" text-anchor=\"middle\" font-size=\"18\" "
        << "font-weight=\"bold\">Sharpe Ratio: " << escape(strategy_title(r))
        << " vs. buy-and-hold</text>\n";

    const struct {
        const char* name;
        const char* color;
        const MetricsSummary* m;
    } bars[] = {{"Strategy", "#4575b4", &r.strategy_metrics},
                {"Buy & hold", "#000000", &r.baseline_metrics}};

    double extent = 0.0;
    for (const auto& b : bars) {
        if (b.m->sharpe && std::isfinite(*b.m->sharpe)) extent = std::max(extent, std::fabs(*b.m->sharpe));
    }
    if (extent == 0.0) extent = 1.0;
    extent *= 1.15;

    const double plot_h = kHeight - kTop - kBottom;
    const double zero_y = kTop + plot_h / 2.0;
    const double unit = (plot_h / 2.0) / extent;
    const double slot = (kWidth - kLeft - kRight) / 2.0;

    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(zero_y) << "\" x2=\""
        << num(kWidth - kRight) << "\" y2=\"" << num(zero_y) << "\" stroke=\"#333333\"/>\n";
    out << "<g font-size=\"13\">\n";
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& b = bars[k];
        const double cx = kLeft + slot * (static_cast<double>(k) + 0.5);
        const double bw = slot * 0.4;
        if (b.m->sharpe && std::isfinite(*b.m->sharpe)) {
            const double v = *b.m->sharpe;
            const double h = std::fabs(v) * unit;
            const double top = v >= 0.0 ? zero_y - h : zero_y;
            out << "<rect x=\"" << num(cx - bw / 2.0) << "\" y=\"" << num(top) << "\" width=\""
                << num(bw) << "\" height=\"" << num(h) << "\" fill=\"" << b.color << "\"/>\n";
        }
        out << "<text x=\"" << num(cx) << "\" y=\"" << num(kHeight - kBottom + 30.0)
            << "\" text-anchor=\"middle\">" << b.name << ": " << escape(sharpe_value(*b.m))
            << "</text>\n";
    }
    out << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kTop - 8.0) << "\" font-size=\"11\">"
        << "annualized with " << label(r.strategy_metrics.periods_per_year)
        << " periods/year, risk-free rate " << label(r.strategy_metrics.risk_free_rate)
        << "</text>\n";
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace

std::array<std::string, 4> render_svg(const BacktestReport& report) {
    return {signals_chart(report), portfolio_chart(report), roi_chart(report), sharpe_chart(report)};
}

std::vector<std::filesystem::path> render(const BacktestReport& report,
                                          const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw Error(ErrorCode::UnwritableOutput,
                    "cannot create '" + out_dir.string() + "': " + ec.message());
    }
    const auto documents = render_svg(report);
    std::vector<std::filesystem::path> paths;
    for (std::size_t k = 0; k < documents.size(); ++k) {
        auto path = out_dir / kChartFiles[k];
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::UnwritableOutput, "cannot write '" + path.string() + "'");
        out << documents[k];
        if (!out) throw Error(ErrorCode::UnwritableOutput, "write failed for '" + path.string() + "'");
        paths.push_back(std::move(path));
    }
    return paths;
}

}  // namespace tradepipe
