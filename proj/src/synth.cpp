#include "ttdkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ttdkit/csv.hpp"
#include "ttdkit/ingest.hpp"

namespace ttdkit {
namespace {

constexpr double kPi = 3.14159265358979323846;

// One pending setpoint/tag event on the active-mode column.
struct Ev {
  Minute slot;       // sample timestamp whose interval contains the switch
  double dt;         // offset within (0, 5]
  EventKind tag;
  int sp_steps;      // new setpoint in unit increments
  bool manual;
};

struct HomePlan {
  TempUnit unit;
  Mode mode;
  double increment_degF;  // 1.0 (degF homes) or 0.9 (degC homes)
  int comfort_steps;
  std::vector<Ev> events;
};

double steps_to_degF(int steps, TempUnit unit) {
  return unit == TempUnit::Celsius ? c_to_f(steps * 0.5) : static_cast<double>(steps);
}

double steps_to_native(int steps, TempUnit unit) {
  return unit == TempUnit::Celsius ? steps * 0.5 : static_cast<double>(steps);
}

class HomeGenerator {
 public:
  HomeGenerator(const SynthConfig& cfg, int home_index)
      : cfg_(cfg), rng_(make_seed(cfg.seed, home_index)) {
    id_ = "h" + std::to_string(home_index);
  }

  void run(SynthHome& out, TrueHome& truth) {
    plan_home(truth);
    build_schedule(truth);
    emit_samples(out, truth);
  }

 private:
  static std::mt19937_64 make_seed(std::uint64_t seed, int idx) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(idx), 0x9e3779b9u};
    return std::mt19937_64(seq);
  }

  double u01() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  void plan_home(TrueHome& truth) {
    unit_ = u01() < cfg_.celsius_fraction ? TempUnit::Celsius : TempUnit::Fahrenheit;
    mode_ = u01() < cfg_.heat_mode_fraction ? Mode::Heat : Mode::Cool;
    single_ = u01() < cfg_.single_occupant_fraction;
    if (unit_ == TempUnit::Fahrenheit) {
      comfort_steps_ = mode_ == Mode::Heat ? uniform_int(67, 72) : uniform_int(73, 78);
    } else {
      // 0.5 degC steps: heat ~19.5-22 degC, cool ~23-26 degC
      comfort_steps_ = mode_ == Mode::Heat ? uniform_int(39, 44) : uniform_int(46, 52);
    }
    truth.id = id_;
    truth.mode = mode_;
    truth.unit = unit_;
    truth.comfort_degF = steps_to_degF(comfort_steps_, unit_);
  }

  // Magnitude in degF -> whole increments of this home's unit.
  int mag_to_steps(int mag_degF) const {
    if (unit_ == TempUnit::Fahrenheit) return mag_degF;
    return std::max(1, static_cast<int>(std::lround(mag_degF / 0.9)));
  }

  double step_degF() const { return unit_ == TempUnit::Celsius ? 0.9 : 1.0; }

  double draw_dt(int delta_steps) {
    switch (cfg_.dt_model) {
      case DtModel::FixedHalf:
        return 2.5;
      case DtModel::Uniform:
        return std::uniform_real_distribution<double>(0.01, 4.99)(rng_);
      case DtModel::Clean: {
        // Offset the switch from mid-interval just enough that the averaged
        // sample leaves the increment grid (an exact mid-interval switch of an
        // even-step change averages onto the grid and would look like two
        // separate changes) while keeping the inversion's rounding exact.
        // delta 0 means "unknown at schedule-build time": size the offset for
        // the largest delta any event can carry.
        const int d = delta_steps == 0 ? 16 : std::abs(delta_steps);
        const double off = 0.75 / static_cast<double>(d);
        return 2.5 + (u01() < 0.5 ? -off : off);
      }
    }
    return 2.5;
  }

  void push_event(Minute slot, int delta_steps_for_dt, EventKind tag, int sp_steps,
                  bool manual) {
    events_.push_back({slot, draw_dt(delta_steps_for_dt), tag, sp_steps, manual});
  }

  // An override opportunity: a programmed setback the occupant experiences.
  // Returns the slot after which the schedule may resume.
  void setback_and_override(Minute transition_min, Minute next_transition_min, EventKind tag,
                            TrueHome& truth) {
    const int mag_degF =
        cfg_.dod_magnitudes_degF[static_cast<std::size_t>(uniform_int(
            0, static_cast<int>(cfg_.dod_magnitudes_degF.size()) - 1))];
    const int steps = mag_to_steps(mag_degF);
    const int dir = mode_ == Mode::Heat ? -1 : +1;  // setback direction
    const int setback_steps = comfort_steps_ + dir * steps;
    const Minute psc_slot = transition_min + 5;
    push_event(psc_slot, steps, tag, setback_steps, false);

    if (u01() >= cfg_.override_prob) return;

    const double dod_degF = steps * step_degF();
    const double median_h = cfg_.law_a_hours * std::exp(cfg_.law_b_per_degF * dod_degF);
    const double planted = 60.0 * median_h * std::exp(cfg_.ttd_sigma_log * normal());
    const double realized = 5.0 * std::max<long>(1, std::lround(planted / 5.0));
    const Minute msc_slot = psc_slot + static_cast<Minute>(realized);
    const Minute limit = next_transition_min;  // hold must resolve before this
    if (msc_slot + 5 >= limit) return;         // occupant slept through it

    // Episode class decides the shape of the correction chain.
    const double r = u01();
    int cls;
    if (r < cfg_.valve_fraction) cls = 0;
    else if (r < cfg_.valve_fraction + cfg_.misestimate_fraction) cls = 1;
    else cls = 2;
    // A one-step setback cannot be undershot; fall back to a clean override.
    if (cls == 1 && steps == 1) cls = 2;

    const int over_dir = -dir;  // overshoot past comfort, energy-intensive side
    int n_follow = 0;
    int first_target = comfort_steps_;
    if (cls == 0) {
      n_follow = 2 + (uniform_int(0, 1));
      first_target = comfort_steps_ + over_dir * n_follow;
    } else if (cls == 1) {
      n_follow = 1;
      first_target = comfort_steps_ - over_dir;  // undershoot, then correct
    }

    // Check the whole chain fits before the next scheduled transition.
    std::vector<Minute> gaps;
    Minute chain_end = msc_slot;
    for (int i = 0; i < n_follow; ++i) {
      const Minute g = 5 * uniform_int(2, 5);  // 10..25 min
      gaps.push_back(g);
      chain_end += g;
    }
    if (chain_end + 5 >= limit) return;

    ++truth.episode_counts[static_cast<std::size_t>(cls)];
    auto record_msc = [&](Minute slot, int from_steps, int to_steps, double planted_ttd,
                          double realized_ttd, bool follow) {
      push_event(slot, std::abs(to_steps - from_steps), EventKind::ManualHold, to_steps, true);
      TrueMsc m;
      m.slot = slot;
      m.planted_ttd_minutes = planted_ttd;
      m.realized_ttd_minutes = realized_ttd;
      m.dod_degF = (to_steps - from_steps) * step_degF();
      m.episode_class = cls;
      m.follow_up = follow;
      truth.mscs.push_back(m);
    };

    record_msc(msc_slot, setback_steps, first_target, planted, realized, false);
    int cur = first_target;
    Minute cur_slot = msc_slot;
    for (int i = 0; i < n_follow; ++i) {
      // Valve chains walk back toward comfort one increment at a time;
      // a misestimate corrects in one step.
      const int next_target = cls == 0 ? comfort_steps_ + over_dir * (n_follow - 1 - i)
                                       : comfort_steps_;
      cur_slot += gaps[static_cast<std::size_t>(i)];
      record_msc(cur_slot, cur, next_target,
                 static_cast<double>(gaps[static_cast<std::size_t>(i)]),
                 static_cast<double>(gaps[static_cast<std::size_t>(i)]), true);
      cur = next_target;
    }
  }

  void build_schedule(TrueHome& truth) {
    const Minute start = to_minutes(cfg_.start);
    const int dir = mode_ == Mode::Heat ? -1 : +1;
    const int away_steps = comfort_steps_ + dir * mag_to_steps(4);

    for (int d = 0; d < cfg_.duration_days; ++d) {
      const Minute day = start + static_cast<Minute>(d) * 1440;
      const bool weekend = is_weekend(day);
      const Minute next_day_wake = day + 1440 + cfg_.wake;

      push_event(day + cfg_.wake + 5, 0, EventKind::ScheduleAwake, comfort_steps_, false);
      if (!weekend) {
        push_event(day + cfg_.leave + 5, std::abs(away_steps - comfort_steps_),
                   EventKind::ScheduleAway, away_steps, false);
        push_event(day + cfg_.come_home + 5, std::abs(away_steps - comfort_steps_),
                   EventKind::ScheduleHome, comfort_steps_, false);
      } else {
        setback_and_override(day + cfg_.weekend_away, day + cfg_.weekend_home,
                             EventKind::ScheduleAway, truth);
        push_event(day + cfg_.weekend_home + 5, 0, EventKind::ScheduleHome, comfort_steps_,
                   false);
      }
      setback_and_override(day + cfg_.sleep_start, next_day_wake, EventKind::ScheduleSleep,
                           truth);
    }
    std::sort(events_.begin(), events_.end(),
              [](const Ev& a, const Ev& b) { return a.slot < b.slot; });
  }

  bool occupied_at(Minute t, Minute start) const {
    const Minute day_off = (t - start) % 1440;
    if (is_weekend(t)) return true;
    return day_off < cfg_.leave || day_off >= cfg_.come_home;
  }

  void emit_samples(SynthHome& out, TrueHome& truth) {
    const Minute start = to_minutes(cfg_.start);
    const std::size_t n = static_cast<std::size_t>(cfg_.duration_days) * 288;

    out.meta.home_id = id_;
    out.meta.occupant_count = single_ ? 1 : 2 + uniform_int(0, 2);
    out.meta.floor_area = 80 + 10 * uniform_int(0, 20);
    out.meta.country = u01() < 0.9 ? "US" : "CA";
    out.samples.reserve(n);

    int cur_steps = comfort_steps_;
    EventKind cur_tag = EventKind::ScheduleSleep;
    std::size_t next_ev = 0;
    std::vector<char> occ_slots(n, 0);

    for (std::size_t i = 0; i < n; ++i) {
      const Minute t = start + 5 * static_cast<Minute>(i + 1);
      Sample s;
      s.time = t;

      double active_native = steps_to_native(cur_steps, unit_);
      if (next_ev < events_.size() && events_[next_ev].slot == t) {
        const Ev& ev = events_[next_ev];
        const double x0 = steps_to_native(cur_steps, unit_);
        const double x1 = steps_to_native(ev.sp_steps, unit_);
        active_native = (ev.dt / 5.0) * x0 + ((5.0 - ev.dt) / 5.0) * x1;
        TrueChange tc;
        tc.slot = t;
        tc.dt_minutes = ev.dt;
        tc.manual = ev.manual;
        tc.mode = mode_;
        tc.prev_degF = steps_to_degF(cur_steps, unit_);
        tc.new_degF = steps_to_degF(ev.sp_steps, unit_);
        if (ev.sp_steps != cur_steps) truth.changes.push_back(tc);
        cur_steps = ev.sp_steps;
        cur_tag = ev.tag;
        if (ev.manual) hold_ = HoldDuration::UntilNext;
        else hold_ = HoldDuration::None;
        ++next_ev;
      }

      const double active_degF =
          unit_ == TempUnit::Celsius ? c_to_f(active_native) : active_native;
      // The idle column stays constant on the home's native increment grid.
      const double idle_cool = steps_to_degF(unit_ == TempUnit::Celsius ? 59 : 85, unit_);
      const double idle_heat = steps_to_degF(unit_ == TempUnit::Celsius ? 31 : 60, unit_);
      if (mode_ == Mode::Heat) {
        s.heat_setpoint = active_degF;
        s.cool_setpoint = idle_cool;
        s.heat_runtime = 120;
      } else {
        s.cool_setpoint = active_degF;
        s.heat_setpoint = idle_heat;
        s.cool_runtime = 120;
      }
      s.indoor_temp = steps_to_degF(cur_steps, unit_);
      const int day = static_cast<int>((t - start) / 1440);
      s.outdoor_temp = 50.0 + 20.0 * std::sin(2.0 * kPi * day / 365.0) +
                       5.0 * std::sin(2.0 * kPi * (minute_of_day(t) - 900) / 1440.0);
      s.event = cur_tag;
      s.hold = cur_tag == EventKind::ManualHold ? hold_ : HoldDuration::None;

      const bool occupied = occupied_at(t - 2, start);
      occ_slots[i] = occupied;
      const double p = occupied ? cfg_.true_positive_rate : cfg_.false_positive_rate;
      s.motion = u01() < p;
      out.samples.push_back(s);
    }

    // Merge per-slot occupancy into [start, end) intervals for ground truth.
    std::size_t i = 0;
    while (i < n) {
      if (!occ_slots[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < n && occ_slots[j + 1]) ++j;
      // Interval endpoints are sample timestamps: [first sample, last sample + 5).
      truth.occupancy.emplace_back(start + 5 * static_cast<Minute>(i + 1),
                                   start + 5 * static_cast<Minute>(j + 2));
      i = j + 1;
    }
  }

  const SynthConfig& cfg_;
  std::mt19937_64 rng_;
  std::string id_;
  TempUnit unit_ = TempUnit::Fahrenheit;
  Mode mode_ = Mode::Heat;
  bool single_ = true;
  int comfort_steps_ = 70;
  HoldDuration hold_ = HoldDuration::None;
  std::vector<Ev> events_;
};

}  // namespace

SynthResult generate(const SynthConfig& cfg) {
  if (cfg.n_homes <= 0 || cfg.duration_days <= 0)
    throw std::invalid_argument("n_homes and duration_days must be positive");
  if (cfg.dod_magnitudes_degF.empty())
    throw std::invalid_argument("dod_magnitudes_degF must not be empty");
  SynthResult result;
  result.truth.config = cfg;
  result.homes.resize(static_cast<std::size_t>(cfg.n_homes));
  result.truth.homes.resize(static_cast<std::size_t>(cfg.n_homes));
  for (int h = 0; h < cfg.n_homes; ++h) {
    HomeGenerator gen(cfg, h);
    gen.run(result.homes[static_cast<std::size_t>(h)],
            result.truth.homes[static_cast<std::size_t>(h)]);
  }
  return result;
}

std::string GroundTruth::to_json() const {
  std::ostringstream os;
  os << "{\"law\":{\"a_hours\":" << fmt_num(config.law_a_hours)
     << ",\"b_per_degF\":" << fmt_num(config.law_b_per_degF) << "},\"seed\":" << config.seed
     << ",\"homes\":[";
  for (std::size_t h = 0; h < homes.size(); ++h) {
    const TrueHome& home = homes[h];
    if (h) os << ",";
    os << "{\"id\":\"" << home.id << "\",\"mode\":\"" << to_string(home.mode)
       << "\",\"unit\":\""
       << (home.unit == TempUnit::Celsius ? "C" : "F") << "\",\"comfort_degF\":"
       << fmt_num(home.comfort_degF) << ",\"episode_counts\":[" << home.episode_counts[0] << ","
       << home.episode_counts[1] << "," << home.episode_counts[2] << "],\"occupancy\":[";
    for (std::size_t i = 0; i < home.occupancy.size(); ++i) {
      if (i) os << ",";
      os << "[" << home.occupancy[i].first << "," << home.occupancy[i].second << "]";
    }
    os << "],\"changes\":[";
    for (std::size_t i = 0; i < home.changes.size(); ++i) {
      const TrueChange& c = home.changes[i];
      if (i) os << ",";
      os << "{\"slot\":" << c.slot << ",\"dt\":" << fmt_num(c.dt_minutes)
         << ",\"manual\":" << (c.manual ? "true" : "false") << ",\"prev\":"
         << fmt_num(c.prev_degF) << ",\"new\":" << fmt_num(c.new_degF) << "}";
    }
    os << "],\"mscs\":[";
    for (std::size_t i = 0; i < home.mscs.size(); ++i) {
      const TrueMsc& m = home.mscs[i];
      if (i) os << ",";
      os << "{\"slot\":" << m.slot << ",\"planted_ttd\":" << fmt_num(m.planted_ttd_minutes)
         << ",\"realized_ttd\":" << fmt_num(m.realized_ttd_minutes)
         << ",\"dod\":" << fmt_num(m.dod_degF) << ",\"class\":" << m.episode_class
         << ",\"follow_up\":" << (m.follow_up ? "true" : "false") << "}";
    }
    os << "]}";
  }
  os << "]}";
  return os.str();
}

void write_corpus(const SynthResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<HomeMeta> metas;
  for (const SynthHome& home : result.homes) {
    metas.push_back(home.meta);
    std::ofstream out(fs::path(dir) / ("home_" + home.meta.home_id + ".csv"));
    write_samples_csv(out, home.samples);
  }
  {
    std::ofstream out(fs::path(dir) / "metadata.csv");
    write_metadata(out, metas);
  }
  {
    std::ofstream out(fs::path(dir) / "ground_truth.json");
    out << result.truth.to_json() << '\n';
  }
}

std::string DiscrepancyReport::to_json() const {
  std::ostringstream os;
  os << "{\"true_sc\":" << true_sc << ",\"detected_sc\":" << detected_sc
     << ",\"matched_sc\":" << matched_sc << ",\"sc_recall\":" << fmt_num(sc_recall)
     << ",\"sc_precision\":" << fmt_num(sc_precision)
     << ",\"cause_accuracy\":" << fmt_num(cause_accuracy)
     << ",\"occupancy_recall\":" << fmt_num(occupancy_recall)
     << ",\"matched_msc\":" << matched_msc
     << ",\"mean_abs_dod_error\":" << fmt_num(mean_abs_dod_error)
     << ",\"mean_abs_ttd_error\":" << fmt_num(mean_abs_ttd_error);
  if (fit_compared) {
    os << ",\"fitted_a_rel_err\":" << fmt_num(fitted_a_rel_err)
       << ",\"fitted_b_rel_err\":" << fmt_num(fitted_b_rel_err);
  }
  os << "}";
  return os.str();
}

DiscrepancyReport oracle_compare(const GroundTruth& truth,
                                 const std::map<std::string, HomePipelineView>& pipeline,
                                 const std::vector<OverrideModel>& fitted_models) {
  DiscrepancyReport rep;
  double dod_err_sum = 0, ttd_err_sum = 0;
  std::size_t ttd_matched = 0;
  std::uint64_t occ_true = 0, occ_covered = 0;

  for (const TrueHome& home : truth.homes) {
    auto it = pipeline.find(home.id);
    if (it == pipeline.end())
      throw std::runtime_error("oracle_compare: pipeline output missing home " + home.id);
    const HomePipelineView& view = it->second;

    std::map<Minute, const SetpointChange*> detected;
    for (const SetpointChange& sc : *view.changes) detected[sc.time] = &sc;
    rep.detected_sc += view.changes->size();
    rep.true_sc += home.changes.size();

    std::map<Minute, const TrueMsc*> true_mscs;
    for (const TrueMsc& m : home.mscs) true_mscs[m.slot] = &m;

    for (const TrueChange& tc : home.changes) {
      auto d = detected.find(tc.slot);
      if (d == detected.end()) continue;
      ++rep.matched_sc;
      if (d->second->manual == tc.manual) ++rep.cause_correct;
      if (tc.manual) {
        auto tm = true_mscs.find(tc.slot);
        if (tm != true_mscs.end()) {
          dod_err_sum +=
              std::fabs((d->second->new_setpoint - d->second->prev_setpoint) -
                        tm->second->dod_degF);
          ++rep.matched_msc;
        }
      }
    }

    for (const MscFeature& f : *view.mscs) {
      if (!f.ttd_minutes) continue;
      auto tm = true_mscs.find(f.sc.time);
      if (tm == true_mscs.end()) continue;
      ttd_err_sum += std::fabs(*f.ttd_minutes - tm->second->realized_ttd_minutes);
      ++ttd_matched;
    }

    if (view.occupancy_filtered) {
      const std::vector<char>& occ = *view.occupancy_filtered;
      for (const auto& [lo, hi] : home.occupancy) {
        for (Minute t = lo; t < hi; t += 5) {
          const std::int64_t idx = (t - view.series_start) / 5;
          if (idx < 0 || idx >= static_cast<std::int64_t>(occ.size())) continue;
          ++occ_true;
          if (occ[static_cast<std::size_t>(idx)]) ++occ_covered;
        }
      }
    }
  }

  rep.sc_recall = rep.true_sc ? static_cast<double>(rep.matched_sc) / rep.true_sc : 0.0;
  rep.sc_precision =
      rep.detected_sc ? static_cast<double>(rep.matched_sc) / rep.detected_sc : 0.0;
  rep.cause_accuracy =
      rep.matched_sc ? static_cast<double>(rep.cause_correct) / rep.matched_sc : 0.0;
  rep.occupancy_recall = occ_true ? static_cast<double>(occ_covered) / occ_true : 0.0;
  rep.mean_abs_dod_error = rep.matched_msc ? dod_err_sum / rep.matched_msc : 0.0;
  rep.mean_abs_ttd_error = ttd_matched ? ttd_err_sum / ttd_matched : 0.0;

  if (!fitted_models.empty()) {
    rep.fit_compared = true;
    double a_err = 0, b_err = 0;
    for (const OverrideModel& m : fitted_models) {
      a_err = std::max(a_err, std::fabs(m.a_hours - truth.config.law_a_hours) /
                                  truth.config.law_a_hours);
      b_err = std::max(b_err, std::fabs(m.b_per_degF - truth.config.law_b_per_degF) /
                                  std::fabs(truth.config.law_b_per_degF));
    }
    rep.fitted_a_rel_err = a_err;
    rep.fitted_b_rel_err = b_err;
  }
  return rep;
}

}  // namespace ttdkit
