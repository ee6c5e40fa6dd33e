#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "stub_server.hpp"
#include "test_support.hpp"
#include "tradepipe/render.hpp"

namespace tradepipe {
namespace {

using testing::fixture;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tradepipe");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

TEST(CliTest, BacktestWritesReportAndCharts) {
    const auto out = testing::scratch_dir("cli_bt");
    const auto r = cli({"backtest", "--csv", fixture("f1_trend.csv").string(), "--strategy", "ma",
                        "--short", "3", "--long", "5", "--fee", "0", "--capital", "10000", "--out",
                        out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(out / "report.json"));
    for (const auto& name : kChartFiles) {
        EXPECT_GT(std::filesystem::file_size(out / name), 0u) << name;
    }
    EXPECT_NE(r.out.find("2 signals"), std::string::npos) << r.out;
}

TEST(CliTest, WindowOrderFailsWithStageTag) {
    const auto r = cli({"backtest", "--csv", fixture("f1_trend.csv").string(), "--short", "200",
                        "--long", "50", "--out", testing::scratch_dir("cli_wo").string()});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("WindowOrder"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("[config]"), std::string::npos) << r.err;
}

TEST(CliTest, ReportReRendersIdenticalCharts) {
    const auto a = testing::scratch_dir("cli_rep_a");
    const auto b = testing::scratch_dir("cli_rep_b");
    ASSERT_EQ(cli({"backtest", "--csv", fixture("f1_trend.csv").string(), "--short", "3", "--long",
                   "5", "--fee", "0", "--out", a.string()})
                  .code,
              0);
    const auto r = cli({"report", "--in", (a / "report.json").string(), "--out", b.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto& name : kChartFiles) EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
}

TEST(CliTest, MissingCsvFailsInLoadStage) {
    const auto r = cli({"backtest", "--csv", "/nonexistent/x.csv", "--out",
                        testing::scratch_dir("cli_missing").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("[load]"), std::string::npos) << r.err;
}

TEST(CliTest, UsageErrors) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"backtest"}).code, 2);
    EXPECT_EQ(cli({"backtest", "--bogus"}).code, 2);
    EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(CliTest, FetchAgainstStub) {
    testing::StubAlphaVantage stub;
    const auto dir = testing::scratch_dir("cli_fetch");
    ::setenv("ALPHAVANTAGE_API_KEY", "demo", 1);
    const auto r = cli({"fetch", "--symbol", "AAPL", "--api-base", stub.base_url(), "--cache-dir",
                        (dir / "cache").string(), "--out", (dir / "aapl.csv").string()});
    ::unsetenv("ALPHAVANTAGE_API_KEY");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "aapl.csv"), slurp(fixture("av/daily_AAPL_expected.csv")));
    EXPECT_EQ(stub.requests(), 1);
}

}  // namespace
}  // namespace tradepipe
