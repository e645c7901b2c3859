#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace cogsearch {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM|-HH:MM]". Throws std::invalid_argument.
Timestamp parse_rfc3339(std::string_view s);

// Always UTC with millisecond precision: "2026-01-02T03:04:05.006Z".
std::string format_rfc3339(Timestamp t);

}  // namespace cogsearch
