#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "ttdkit/time_util.hpp"

namespace ttdkit {

// Event tag carried by a telemetry sample; exactly one per sample.
enum class EventKind {
  None,
  ManualHold,
  ScheduleAwake,
  ScheduleAway,
  ScheduleHome,
  ScheduleSleep,
  SmartAway,
  SmartHome,
  SmartRecovery,
  DemandResponse,
};

enum class HoldDuration { None, TwoHour, FourHour, UntilNext, Indefinite };

const char* to_string(EventKind k);
std::optional<EventKind> event_from_string(std::string_view s, HoldDuration* hold = nullptr);
std::string event_to_token(EventKind k, HoldDuration hold);

// One 5-minute telemetry row. Setpoints/temperatures are stored in the raw
// unit as-read (degF in the wire format) and in degF after conditioning.
struct Sample {
  Minute time = 0;
  double heat_setpoint = 0.0;
  double cool_setpoint = 0.0;
  double indoor_temp = 0.0;
  std::optional<double> outdoor_temp;
  EventKind event = EventKind::None;
  HoldDuration hold = HoldDuration::None;
  bool motion = false;       // any PIR sensor triggered in the interval
  int heat_runtime = 0;      // seconds in [0, 300]
  int cool_runtime = 0;      // seconds in [0, 300]
};

struct HomeMeta {
  std::string home_id;
  std::optional<int> occupant_count;
  std::optional<double> floor_area;
  std::optional<std::string> country;
};

struct CohortCriteria {
  std::optional<int> occupant_count;          // exact match when set
  std::size_t min_msc_count = 10;
  std::optional<std::set<std::string>> countries;
};

enum class Mode { Heat, Cool };
const char* to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

inline double f_to_c(double f) { return (f - 32.0) / 1.8; }
inline double c_to_f(double c) { return c * 1.8 + 32.0; }

}  // namespace ttdkit
