#include "ttdkit/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "ttdkit/csv.hpp"
#include "ttdkit/ingest.hpp"

namespace ttdkit {
namespace {

constexpr double kChangeTol = 1e-6;
constexpr Minute kRuntimeWindowMin = 12 * 60;

// Any runtime seconds for the given mode within +/-12 h of samples[i]?
class RuntimeWindow {
 public:
  explicit RuntimeWindow(std::span<const Sample> samples) : samples_(samples) {
    heat_prefix_.resize(samples.size() + 1, 0);
    cool_prefix_.resize(samples.size() + 1, 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      heat_prefix_[i + 1] = heat_prefix_[i] + samples[i].heat_runtime;
      cool_prefix_[i + 1] = cool_prefix_[i] + samples[i].cool_runtime;
    }
  }

  bool active(Mode mode, std::size_t i) const {
    const Minute t = samples_[i].time;
    const std::size_t lo = lower_index(t - kRuntimeWindowMin);
    const std::size_t hi = upper_index(t + kRuntimeWindowMin);
    const auto& prefix = mode == Mode::Heat ? heat_prefix_ : cool_prefix_;
    return prefix[hi] - prefix[lo] > 0;
  }

 private:
  std::size_t lower_index(Minute t) const {
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                               [](const Sample& s, Minute v) { return s.time < v; });
    return static_cast<std::size_t>(it - samples_.begin());
  }
  std::size_t upper_index(Minute t) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](Minute v, const Sample& s) { return v < s.time; });
    return static_cast<std::size_t>(it - samples_.begin());
  }

  std::span<const Sample> samples_;
  std::vector<std::int64_t> heat_prefix_;
  std::vector<std::int64_t> cool_prefix_;
};

}  // namespace

std::vector<SetpointChange> detect_changes(std::span<const Sample> samples,
                                           const std::string& home_id,
                                           const std::vector<char>& heat_corrected,
                                           const std::vector<char>& cool_corrected,
                                           ChangeDiagnostics* diag) {
  std::vector<SetpointChange> changes;
  if (samples.size() < 2) return changes;
  RuntimeWindow runtime(samples);

  auto was_corrected = [](const std::vector<char>& mask, std::size_t i) {
    return i < mask.size() && mask[i];
  };

  for (std::size_t i = 1; i < samples.size(); ++i) {
    const bool heat_moved =
        std::fabs(samples[i].heat_setpoint - samples[i - 1].heat_setpoint) > kChangeTol;
    const bool cool_moved =
        std::fabs(samples[i].cool_setpoint - samples[i - 1].cool_setpoint) > kChangeTol;
    if (!heat_moved && !cool_moved) continue;

    auto emit = [&](Mode mode) {
      SetpointChange sc;
      sc.home_id = home_id;
      sc.index = i;
      sc.time = samples[i].time;
      sc.mode = mode;
      sc.prev_setpoint =
          mode == Mode::Heat ? samples[i - 1].heat_setpoint : samples[i - 1].cool_setpoint;
      sc.new_setpoint = mode == Mode::Heat ? samples[i].heat_setpoint : samples[i].cool_setpoint;
      sc.manual = samples[i].event == EventKind::ManualHold;
      sc.cause_event = samples[i].event;
      sc.deaveraged = mode == Mode::Heat ? was_corrected(heat_corrected, i)
                                         : was_corrected(cool_corrected, i);
      changes.push_back(std::move(sc));
    };

    if (heat_moved && cool_moved) {
      // Auto mode: only trust a simultaneous two-column change when both
      // kinds of equipment actually ran recently.
      if (runtime.active(Mode::Heat, i) && runtime.active(Mode::Cool, i)) {
        emit(Mode::Heat);
        emit(Mode::Cool);
      } else if (diag) {
        ++diag->skipped_simultaneous;
      }
    } else if (heat_moved) {
      if (runtime.active(Mode::Heat, i)) emit(Mode::Heat);
      else if (diag) ++diag->skipped_no_runtime;
    } else {
      if (runtime.active(Mode::Cool, i)) emit(Mode::Cool);
      else if (diag) ++diag->skipped_no_runtime;
    }
  }
  return changes;
}

void attribute_prior_event(std::vector<SetpointChange>& changes) {
  for (std::size_t i = 0; i < changes.size(); ++i) {
    if (i == 0) {
      changes[i].has_prior = false;
      continue;
    }
    changes[i].has_prior = true;
    changes[i].prior_manual = changes[i - 1].manual;
    changes[i].prior_event = changes[i - 1].cause_event;
  }
}

EnergyImpact classify_energy_impact(Mode mode, double dod) {
  const bool intensive = (mode == Mode::Heat && dod > 0) || (mode == Mode::Cool && dod < 0);
  return intensive ? EnergyImpact::Intensive : EnergyImpact::Saving;
}

std::vector<MscFeature> compute_ttd_dod(const std::vector<SetpointChange>& changes,
                                        const std::vector<OccupancySegment>& segments) {
  std::vector<MscFeature> features;

  auto contained = [&](std::size_t from, std::size_t to) {
    for (const OccupancySegment& seg : segments) {
      if (seg.first <= from && to <= seg.last) return true;
      if (seg.first > from) break;  // segments are ordered
    }
    return false;
  };

  for (std::size_t i = 0; i < changes.size(); ++i) {
    const SetpointChange& sc = changes[i];
    if (!sc.manual) continue;
    MscFeature f;
    f.home_id = sc.home_id;
    f.sc = sc;
    f.dod = sc.new_setpoint - sc.prev_setpoint;
    f.season_mode = sc.mode;
    f.energy_impact = classify_energy_impact(sc.mode, f.dod);
    f.tod_minutes = minute_of_day(sc.time);
    f.weekend = is_weekend(sc.time);
    if (i > 0) {
      const SetpointChange& prev = changes[i - 1];
      f.ttd_minutes = static_cast<double>(sc.time - prev.time);
      f.continuously_occupied = contained(prev.index, sc.index);
      f.within_2h = *f.ttd_minutes < 120.0;
    }
    if (i + 1 < changes.size()) {
      f.duration_to_next_sc_minutes = static_cast<double>(changes[i + 1].time - sc.time);
    }
    features.push_back(std::move(f));
  }
  return features;
}

const char* to_string(MentalModelClass c) {
  switch (c) {
    case MentalModelClass::ValveTrait: return "valve_trait";
    case MentalModelClass::FeedbackMisestimate: return "feedback_misestimate";
    case MentalModelClass::Feedback: return "feedback";
  }
  return "feedback";
}

MentalModelResult classify_mental_model(const std::vector<SetpointChange>& changes,
                                        int window_minutes) {
  MentalModelResult result;
  std::vector<Minute> manual_times;
  for (const SetpointChange& sc : changes)
    if (sc.manual) manual_times.push_back(sc.time);
  if (manual_times.empty()) return result;

  std::size_t i = 0;
  while (i < manual_times.size()) {
    std::size_t j = i;
    while (j + 1 < manual_times.size() &&
           manual_times[j + 1] - manual_times[j] <= window_minutes) {
      ++j;
    }
    const std::size_t follow_ups = j - i;
    if (follow_ups >= 2) ++result.episode_counts[0];
    else if (follow_ups == 1) ++result.episode_counts[1];
    else ++result.episode_counts[2];
    i = j + 1;
  }

  // Modal class; ties break toward valve-trait then misestimate.
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k)
    if (result.episode_counts[k] > result.episode_counts[best]) best = k;
  result.home_class = static_cast<MentalModelClass>(best);
  return result;
}

namespace {

const char* kMscHeader =
    "home_id,time,mode,prev_setpoint,new_setpoint,dod,ttd_minutes,prior,continuously_occupied,"
    "within_2h,energy_impact,tod_minutes,weekend,duration_to_next_sc_minutes,deaveraged";

std::string prior_token(const MscFeature& f) {
  if (!f.sc.has_prior) return "none";
  if (f.sc.prior_manual) return "manual";
  return to_string(f.sc.prior_event);
}

}  // namespace

void write_msc_csv(std::ostream& out, const std::vector<MscFeature>& features) {
  out << kMscHeader << '\n';
  for (const MscFeature& f : features) {
    out << f.home_id << ',' << format_datetime(f.sc.time) << ',' << to_string(f.sc.mode) << ','
        << fmt_num(f.sc.prev_setpoint) << ',' << fmt_num(f.sc.new_setpoint) << ','
        << fmt_num(f.dod) << ',';
    if (f.ttd_minutes) out << fmt_num(*f.ttd_minutes);
    out << ',' << prior_token(f) << ',' << (f.continuously_occupied ? '1' : '0') << ','
        << (f.within_2h ? '1' : '0') << ','
        << (f.energy_impact == EnergyImpact::Intensive ? "intensive" : "saving") << ','
        << f.tod_minutes << ',' << (f.weekend ? '1' : '0') << ',';
    if (f.duration_to_next_sc_minutes) out << fmt_num(*f.duration_to_next_sc_minutes);
    out << ',' << (f.sc.deaveraged ? '1' : '0') << '\n';
  }
}

std::vector<MscFeature> read_msc_csv(std::istream& in) {
  std::vector<MscFeature> features;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty MSC feature file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMscHeader) throw ParseError("unexpected MSC feature header");

  auto to_double = [](std::string_view s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw ParseError("bad number in MSC feature file");
    return v;
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 15) throw ParseError("bad MSC feature row");
    MscFeature m;
    m.home_id = std::string(f[0]);
    m.sc.home_id = m.home_id;
    auto t = parse_datetime(f[1]);
    if (!t) throw ParseError("bad timestamp in MSC feature file");
    m.sc.time = *t;
    auto mode = mode_from_string(f[2]);
    if (!mode) throw ParseError("bad mode in MSC feature file");
    m.sc.mode = *mode;
    m.season_mode = *mode;
    m.sc.prev_setpoint = to_double(f[3]);
    m.sc.new_setpoint = to_double(f[4]);
    m.sc.manual = true;
    m.dod = to_double(f[5]);
    if (!f[6].empty()) m.ttd_minutes = to_double(f[6]);
    if (f[7] == "none") {
      m.sc.has_prior = false;
    } else {
      m.sc.has_prior = true;
      if (f[7] == "manual") {
        m.sc.prior_manual = true;
        m.sc.prior_event = EventKind::ManualHold;
      } else {
        auto ev = event_from_string(f[7]);
        if (!ev) throw ParseError("bad prior event in MSC feature file");
        m.sc.prior_event = *ev;
      }
    }
    m.continuously_occupied = f[8] == "1";
    m.within_2h = f[9] == "1";
    m.energy_impact = f[10] == "intensive" ? EnergyImpact::Intensive : EnergyImpact::Saving;
    m.tod_minutes = static_cast<int>(to_double(f[11]));
    m.weekend = f[12] == "1";
    if (!f[13].empty()) m.duration_to_next_sc_minutes = to_double(f[13]);
    m.sc.deaveraged = f[14] == "1";
    features.push_back(std::move(m));
  }
  return features;
}

}  // namespace ttdkit
