#pragma once

#include <chrono>
#include <string>

namespace bp {

/// RFC 3339 UTC timestamp, second precision: "2026-08-10T13:15:00Z".
std::string rfc3339_utc(std::chrono::system_clock::time_point tp);
std::string rfc3339_utc_now();

/// Compact UTC stamp used in job root names: "20260810T131500Z".
std::string utc_compact_now();

} // namespace bp
