#include "ttdkit/time_util.hpp"

#include <cstdio>

namespace ttdkit {
namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

Minute to_minutes(const CivilTime& ct) {
  return days_from_civil(ct.year, ct.month, ct.day) * 1440 + ct.hour * 60 + ct.minute;
}

CivilTime from_minutes(Minute m) {
  std::int64_t days = m / 1440;
  std::int64_t rem = m % 1440;
  if (rem < 0) {
    rem += 1440;
    days -= 1;
  }
  CivilTime ct;
  civil_from_days(days, ct.year, ct.month, ct.day);
  ct.hour = static_cast<int>(rem / 60);
  ct.minute = static_cast<int>(rem % 60);
  return ct;
}

int weekday(Minute m) {
  std::int64_t days = m / 1440;
  if (m % 1440 < 0) days -= 1;
  // 1970-01-01 was a Thursday.
  return static_cast<int>((((days + 3) % 7) + 7) % 7);
}

bool is_weekend(Minute m) { return weekday(m) >= 5; }

std::optional<Minute> parse_datetime(std::string_view s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  std::string buf(s);
  int n = std::sscanf(buf.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &sec);
  if (n < 5) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59)
    return std::nullopt;
  if (n == 6 && (sec < 0 || sec > 59)) return std::nullopt;
  return to_minutes(CivilTime{y, mo, d, h, mi});
}

std::string format_datetime(Minute m) {
  const CivilTime ct = from_minutes(m);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:00", ct.year, ct.month, ct.day,
                ct.hour, ct.minute);
  return buf;
}

}  // namespace ttdkit
