#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tradepipe {

enum class ErrorCode {
    InvalidArgument,
    Io,
    MissingColumn,
    UnparseableRow,
    EmptySeries,
    DuplicateTimestamp,
    RateLimitExceeded,
    ApiError,
    MalformedPayload,
    UnsupportedAsset,
    WindowZero,
    WindowTooLarge,
    WindowOrder,
    MisalignedSeries,
    SignalNotInSeries,
    TooFewPoints,
    ZeroVolatility,
    UnwritableOutput,
    DataSource,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is
/// stable and meant for programmatic handling; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    /// Message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

/// A CSV row that failed to parse or violated a bar invariant.
/// `line()` is the 1-based physical line in the file (the header is line 1).
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& reason);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Non-success reply from the market data API, or an error document it
/// returned with HTTP 200.
class ApiError : public Error {
public:
    ApiError(int status, std::string body_excerpt);

    int status() const noexcept { return status_; }
    const std::string& body_excerpt() const noexcept { return excerpt_; }

private:
    int status_;
    std::string excerpt_;
};

/// Wraps a module error with the pipeline stage it escaped from.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause);

    const std::string& stage() const noexcept { return stage_; }
    ErrorCode cause_code() const noexcept { return cause_; }

private:
    std::string stage_;
    ErrorCode cause_;
};

}  // namespace tradepipe
