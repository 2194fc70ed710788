#include "bp/time_util.hpp"

#include <cstdio>
#include <ctime>

namespace bp {

namespace {

std::tm to_utc_tm(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm out{};
    gmtime_r(&t, &out);
    return out;
}

} // namespace

std::string rfc3339_utc(std::chrono::system_clock::time_point tp) {
    const std::tm tm = to_utc_tm(tp);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string rfc3339_utc_now() {
    return rfc3339_utc(std::chrono::system_clock::now());
}

std::string utc_compact_now() {
    const std::tm tm = to_utc_tm(std::chrono::system_clock::now());
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d%02d%02dT%02d%02d%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

} // namespace bp
