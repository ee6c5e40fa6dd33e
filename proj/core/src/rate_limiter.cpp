#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tradepipe/alpha_vantage.hpp"
#include "tradepipe/error.hpp"

namespace tradepipe {

namespace {

using namespace std::chrono;

std::int64_t to_ms(system_clock::time_point tp) {
    return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

system_clock::time_point from_ms(std::int64_t ms) {
    return system_clock::time_point{duration_cast<system_clock::duration>(milliseconds{ms})};
}

void write_file_atomically(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void FetchPolicy::validate() const {
    if (max_requests_per_minute == 0 || max_requests_per_day == 0) {
        throw Error(ErrorCode::InvalidArgument, "request limits must be > 0");
    }
}

Clock system_clock() {
    return [] { return std::chrono::system_clock::now(); };
}

RateLimiter::RateLimiter(std::size_t per_minute, std::size_t per_day,
                         std::optional<std::filesystem::path> state_file, Clock clock)
    : per_minute_(per_minute),
      per_day_(per_day),
      state_file_(std::move(state_file)),
      clock_(std::move(clock)) {
    if (per_minute_ == 0 || per_day_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "request limits must be > 0");
    }
    load();
}

void RateLimiter::prune(TimePoint now) const {
    while (!recent_.empty() && now - recent_.front() >= minutes{1}) recent_.pop_front();
    const auto today = floor<days>(now);
    if (today != day_) {
        day_ = today;
        day_count_ = 0;
    }
}

void RateLimiter::acquire() {
    std::lock_guard lock(mutex_);
    const auto now = clock_();
    prune(now);
    if (recent_.size() >= per_minute_) {
        throw Error(ErrorCode::RateLimitExceeded,
                    std::to_string(per_minute_) + " requests already issued in the last minute");
    }
    if (day_count_ >= per_day_) {
        throw Error(ErrorCode::RateLimitExceeded,
                    std::to_string(per_day_) + " requests already issued today (UTC)");
    }
    recent_.push_back(now);
    ++day_count_;
    save();
}

std::size_t RateLimiter::requests_last_minute() const {
    std::lock_guard lock(mutex_);
    prune(clock_());
    return recent_.size();
}

std::size_t RateLimiter::requests_today() const {
    std::lock_guard lock(mutex_);
    prune(clock_());
    return day_count_;
}

void RateLimiter::load() {
    if (!state_file_ || !std::filesystem::exists(*state_file_)) return;
    std::ifstream in(*state_file_);
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::Io, "corrupt rate limit state '" + state_file_->string() + "'");
    }
    day_ = sys_days{days{doc.value("day", std::int64_t{0})}};
    day_count_ = doc.value("day_count", std::size_t{0});
    for (const auto& ms : doc.value("recent_ms", nlohmann::json::array())) {
        recent_.push_back(from_ms(ms.get<std::int64_t>()));
    }
}

void RateLimiter::save() const {
    if (!state_file_) return;
    nlohmann::json doc;
    doc["day"] = day_.time_since_epoch().count();
    doc["day_count"] = day_count_;
    auto recent = nlohmann::json::array();
    for (const auto& tp : recent_) recent.push_back(to_ms(tp));
    doc["recent_ms"] = std::move(recent);
    write_file_atomically(*state_file_, doc.dump());
}

SeriesCache::SeriesCache(std::filesystem::path dir, std::chrono::seconds ttl, Clock clock)
    : dir_(std::move(dir)), ttl_(ttl), clock_(std::move(clock)) {}

std::filesystem::path SeriesCache::path_for(const std::string& key) const {
    return dir_ / (key + ".csv");
}

std::map<std::string, std::int64_t> SeriesCache::read_index() const {
    std::map<std::string, std::int64_t> index;
    const auto path = dir_ / "cache_index.json";
    if (!std::filesystem::exists(path)) return index;
    std::ifstream in(path);
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return index;
    for (const auto& [key, value] : doc.items()) index[key] = value.get<std::int64_t>();
    return index;
}

void SeriesCache::write_index(const std::map<std::string, std::int64_t>& index) const {
    write_file_atomically(dir_ / "cache_index.json", nlohmann::json(index).dump(1));
}

std::optional<std::string> SeriesCache::get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    const auto index = read_index();
    const auto it = index.find(key);
    if (it == index.end()) return std::nullopt;
    if (clock_() - from_ms(it->second) >= ttl_) return std::nullopt;
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void SeriesCache::put(const std::string& key, const std::string& csv_text) {
    std::lock_guard lock(mutex_);
    write_file_atomically(path_for(key), csv_text);
    auto index = read_index();
    index[key] = to_ms(clock_());
    write_index(index);
}

}  // namespace tradepipe
