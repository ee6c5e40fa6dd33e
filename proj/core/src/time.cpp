#include "tradepipe/time.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "tradepipe/error.hpp"

namespace tradepipe {

namespace {

using namespace std::chrono;

[[noreturn]] void bad_timestamp(std::string_view text, const char* why) {
    throw Error(ErrorCode::InvalidArgument,
                "bad timestamp '" + std::string(text) + "': " + why);
}

// Reads exactly `width` digits at `pos`.
int read_digits(std::string_view text, std::size_t pos, std::size_t width) {
    if (pos + width > text.size()) bad_timestamp(text, "truncated");
    int value = 0;
    const auto* first = text.data() + pos;
    const auto* last = first + width;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) bad_timestamp(text, "expected digits");
    return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c) bad_timestamp(text, "unexpected separator");
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }

    const int y = read_digits(text, 0, 4);
    expect(text, 4, '-');
    const int mo = read_digits(text, 5, 2);
    expect(text, 7, '-');
    const int d = read_digits(text, 8, 2);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) bad_timestamp(text, "invalid calendar date");

    int h = 0;
    int mi = 0;
    int s = 0;
    std::size_t pos = 10;
    if (pos < text.size()) {
        if (text[pos] != 'T' && text[pos] != ' ') bad_timestamp(text, "expected 'T' or ' '");
        h = read_digits(text, pos + 1, 2);
        expect(text, pos + 3, ':');
        mi = read_digits(text, pos + 4, 2);
        pos += 6;
        if (pos < text.size() && text[pos] == ':') {
            s = read_digits(text, pos + 1, 2);
            pos += 3;
        }
        if (pos < text.size() && text[pos] == '.') {
            // Fractional seconds are truncated.
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
    }
    if (h > 23 || mi > 59 || s > 59) bad_timestamp(text, "time of day out of range");

    seconds offset{0};
    if (pos < text.size()) {
        const char z = text[pos];
        if (z == 'Z' || z == 'z') {
            ++pos;
        } else if (z == '+' || z == '-') {
            const int oh = read_digits(text, pos + 1, 2);
            expect(text, pos + 3, ':');
            const int om = read_digits(text, pos + 4, 2);
            offset = hours{oh} + minutes{om};
            if (z == '-') offset = -offset;
            pos += 6;
        }
    }
    if (pos != text.size()) bad_timestamp(text, "trailing characters");

    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} - offset;
}

std::string format_timestamp(Timestamp ts) {
    const auto dp = floor<days>(ts);
    const year_month_day ymd{dp};
    const hh_mm_ss hms{ts - dp};
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                  static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf.data();
}

std::string format_date(Timestamp ts) {
    const year_month_day ymd{floor<days>(ts)};
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf.data();
}

sys_days utc_day(Timestamp ts) { return floor<days>(ts); }

Interval parse_interval(std::string_view text) {
    if (text == "daily" || text == "1d" || text == "1day") return kDaily;
    if (text.size() > 3 && text.substr(text.size() - 3) == "min") {
        int minutes_count = 0;
        const auto digits = text.substr(0, text.size() - 3);
        auto [ptr, ec] =
            std::from_chars(digits.data(), digits.data() + digits.size(), minutes_count);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && minutes_count > 0) {
            return minutes{minutes_count};
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown interval '" + std::string(text) + "'");
}

std::string interval_name(Interval interval) {
    if (interval == kDaily) return "daily";
    if (interval.count() % 60 == 0) return std::to_string(interval.count() / 60) + "min";
    return std::to_string(interval.count()) + "s";
}

Timestamp us_eastern_to_utc(local_seconds local) {
    const auto local_day = floor<days>(local);
    const year y = year_month_day{local_day}.year();

    local_days dst_start;
    local_days dst_end;
    if (y >= year{2007}) {
        dst_start = local_days{y / March / Sunday[2]};
        dst_end = local_days{y / November / Sunday[1]};
    } else {
        dst_start = local_days{y / April / Sunday[1]};
        dst_end = local_days{y / October / Sunday[last]};
    }
    // Both transitions happen at 02:00 local wall time.
    const bool dst = local >= dst_start + hours{2} && local < dst_end + hours{2};
    const hours utc_minus_local = dst ? hours{4} : hours{5};
    return Timestamp{local.time_since_epoch() + utc_minus_local};
}

}  // namespace tradepipe
