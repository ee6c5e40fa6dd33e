#pragma once

#include <iosfwd>

namespace tradepipe::cli {

/// Entry point behind the `tradepipe` binary: `fetch`, `backtest`, `report`.
/// Returns the process exit code; failures print a stage-tagged message to
/// `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tradepipe::cli
