#include "tradepipe/error.hpp"

#include <utility>

namespace tradepipe {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::UnparseableRow: return "UnparseableRow";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
        case ErrorCode::RateLimitExceeded: return "RateLimitExceeded";
        case ErrorCode::ApiError: return "ApiError";
        case ErrorCode::MalformedPayload: return "MalformedPayload";
        case ErrorCode::UnsupportedAsset: return "UnsupportedAsset";
        case ErrorCode::WindowZero: return "WindowZero";
        case ErrorCode::WindowTooLarge: return "WindowTooLarge";
        case ErrorCode::WindowOrder: return "WindowOrder";
        case ErrorCode::MisalignedSeries: return "MisalignedSeries";
        case ErrorCode::SignalNotInSeries: return "SignalNotInSeries";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::ZeroVolatility: return "ZeroVolatility";
        case ErrorCode::UnwritableOutput: return "UnwritableOutput";
        case ErrorCode::DataSource: return "DataSource";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

RowError::RowError(std::size_t line, const std::string& reason)
    : Error(ErrorCode::UnparseableRow, "line " + std::to_string(line) + ": " + reason),
      line_(line) {}

ApiError::ApiError(int status, std::string body_excerpt)
    : Error(ErrorCode::ApiError, "HTTP " + std::to_string(status) + ": " + body_excerpt),
      status_(status),
      excerpt_(std::move(body_excerpt)) {}

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), "[" + stage + "] " + cause.detail()),
      stage_(std::move(stage)),
      cause_(cause.code()) {}

}  // namespace tradepipe
