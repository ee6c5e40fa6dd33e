#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tradepipe/report.hpp"

namespace tradepipe {

/// Output names, in dashboard order: signals, portfolio, ROI, Sharpe.
inline constexpr std::array<std::string_view, 4> kChartFiles{
    "chart_signals.svg", "chart_portfolio.svg", "chart_roi.svg", "chart_sharpe.svg"};

/// SVG documents for the four dashboards, drawn from the report only.
std::array<std::string, 4> render_svg(const BacktestReport& report);

/// Writes the four charts into out_dir and returns their paths. Output is
/// byte-identical for identical reports. Throws UnwritableOutput.
std::vector<std::filesystem::path> render(const BacktestReport& report,
                                          const std::filesystem::path& out_dir);

}  // namespace tradepipe
