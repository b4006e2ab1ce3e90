#include "ttdkit/types.hpp"

namespace ttdkit {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::None: return "none";
    case EventKind::ManualHold: return "hold";
    case EventKind::ScheduleAwake: return "schedule_awake";
    case EventKind::ScheduleAway: return "schedule_away";
    case EventKind::ScheduleHome: return "schedule_home";
    case EventKind::ScheduleSleep: return "schedule_sleep";
    case EventKind::SmartAway: return "smart_away";
    case EventKind::SmartHome: return "smart_home";
    case EventKind::SmartRecovery: return "smart_recovery";
    case EventKind::DemandResponse: return "demand_response";
  }
  return "none";
}

std::optional<EventKind> event_from_string(std::string_view s, HoldDuration* hold) {
  if (hold) *hold = HoldDuration::None;
  if (s.empty() || s == "none") return EventKind::None;
  if (s.rfind("hold", 0) == 0) {
    HoldDuration d = HoldDuration::UntilNext;
    std::string_view suffix = s.substr(4);
    if (suffix == ":2h") d = HoldDuration::TwoHour;
    else if (suffix == ":4h") d = HoldDuration::FourHour;
    else if (suffix == ":next" || suffix.empty()) d = HoldDuration::UntilNext;
    else if (suffix == ":indef") d = HoldDuration::Indefinite;
    else return std::nullopt;
    if (hold) *hold = d;
    return EventKind::ManualHold;
  }
  if (s == "schedule_awake") return EventKind::ScheduleAwake;
  if (s == "schedule_away") return EventKind::ScheduleAway;
  if (s == "schedule_home") return EventKind::ScheduleHome;
  if (s == "schedule_sleep") return EventKind::ScheduleSleep;
  if (s == "smart_away") return EventKind::SmartAway;
  if (s == "smart_home") return EventKind::SmartHome;
  if (s == "smart_recovery") return EventKind::SmartRecovery;
  if (s == "demand_response") return EventKind::DemandResponse;
  return std::nullopt;
}

std::string event_to_token(EventKind k, HoldDuration hold) {
  if (k != EventKind::ManualHold) return to_string(k);
  switch (hold) {
    case HoldDuration::TwoHour: return "hold:2h";
    case HoldDuration::FourHour: return "hold:4h";
    case HoldDuration::Indefinite: return "hold:indef";
    case HoldDuration::UntilNext:
    case HoldDuration::None: return "hold";
  }
  return "hold";
}

const char* to_string(Mode m) { return m == Mode::Heat ? "heat" : "cool"; }

std::optional<Mode> mode_from_string(std::string_view s) {
  if (s == "heat") return Mode::Heat;
  if (s == "cool") return Mode::Cool;
  return std::nullopt;
}

}  // namespace ttdkit
