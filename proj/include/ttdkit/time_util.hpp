#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ttdkit {

// Naive local time, minutes since 1970-01-01 00:00. No timezone math:
// time-of-day statistics are local by construction.
using Minute = std::int64_t;

struct CivilTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
};

Minute to_minutes(const CivilTime& ct);
CivilTime from_minutes(Minute m);

// 0 = Monday .. 6 = Sunday
int weekday(Minute m);
bool is_weekend(Minute m);

inline int minute_of_day(Minute m) {
  return static_cast<int>(((m % 1440) + 1440) % 1440);
}

inline bool on_grid(Minute m) { return ((m % 5) + 5) % 5 == 0; }

// "YYYY-MM-DD HH:MM" or "YYYY-MM-DD HH:MM:SS"
std::optional<Minute> parse_datetime(std::string_view s);
std::string format_datetime(Minute m);

}  // namespace ttdkit
