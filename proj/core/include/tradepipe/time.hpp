#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace tradepipe {

/// UTC instant at one-second resolution. Every bar, signal and snapshot is
/// stamped in UTC; local exchange times are converted on ingest.
using Timestamp = std::chrono::sys_seconds;

/// Bar duration.
using Interval = std::chrono::seconds;

inline constexpr Interval kDaily{86400};
inline constexpr Interval kFiveMinutes{300};

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DD HH:MM[:SS]` and RFC 3339
/// (`YYYY-MM-DDTHH:MM:SS` with `Z` or a `+HH:MM`/`-HH:MM` offset).
/// Date-only values land on 00:00:00 UTC. Throws Error(InvalidArgument).
Timestamp parse_timestamp(std::string_view text);

/// RFC 3339 in UTC, e.g. `2021-06-01T00:00:00Z`.
std::string format_timestamp(Timestamp ts);

/// `YYYY-MM-DD` of the UTC calendar day containing `ts`.
std::string format_date(Timestamp ts);

std::chrono::sys_days utc_day(Timestamp ts);

/// `daily`/`1d`, `1min`, `5min`, `15min`, `30min`, `60min`.
Interval parse_interval(std::string_view text);

/// Inverse of parse_interval: `daily` for one day, otherwise `<n>min`.
std::string interval_name(Interval interval);

/// Converts a wall-clock time in America/New_York to UTC using the US DST
/// rules in force since 1987. Ambiguous fall-back times resolve to daylight
/// time, and so do the nonexistent spring-forward times.
Timestamp us_eastern_to_utc(std::chrono::local_seconds local);

}  // namespace tradepipe
