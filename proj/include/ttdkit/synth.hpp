#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ttdkit/condition.hpp"
#include "ttdkit/features.hpp"
#include "ttdkit/model.hpp"
#include "ttdkit/types.hpp"

namespace ttdkit {

// How the sub-interval switch time of each generated setpoint change is drawn.
//   Clean:     near mid-interval, offset just enough that the time-averaged
//              sample is off-grid and the mid-interval inversion recovers the
//              change exactly for any magnitude.
//   FixedHalf: exactly mid-interval (even-magnitude changes then average onto
//              the grid and split into two detected changes).
//   Uniform:   anywhere in the interval (realistic; large changes are then
//              recovered only approximately, as the inversion's error bound
//              allows).
enum class DtModel { Clean, FixedHalf, Uniform };

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_homes = 10;
  int duration_days = 30;
  CivilTime start = {2017, 1, 2, 0, 0};  // a Monday

  double celsius_fraction = 0.2;
  double single_occupant_fraction = 0.6;
  double heat_mode_fraction = 0.5;

  // Schedule template, minutes since local midnight.
  int wake = 6 * 60;
  int leave = 9 * 60;        // weekdays only
  int come_home = 18 * 60;   // weekdays only
  int sleep_start = 22 * 60;
  int weekend_away = 14 * 60;  // weekend afternoon setback (occupants stay in)
  int weekend_home = 18 * 60;

  // Planted override law: median TTD hours = a * exp(b * |DoD degF|), with
  // lognormal spread around the median.
  double law_a_hours = 0.54;
  double law_b_per_degF = -0.08;
  double ttd_sigma_log = 0.3;
  double override_prob = 0.8;
  std::vector<int> dod_magnitudes_degF = {1, 2, 3, 4, 5, 6, 7, 8};

  // Per-episode mental-model mix: valve-trait / feedback-misestimate /
  // feedback fractions.
  double valve_fraction = 0.20;
  double misestimate_fraction = 0.52;
  double feedback_fraction = 0.28;

  // PIR sensor bias.
  double true_positive_rate = 0.33;
  double false_positive_rate = 0.03;

  DtModel dt_model = DtModel::Clean;
};

struct TrueChange {
  Minute slot = 0;        // sample timestamp whose interval contains the switch
  double dt_minutes = 0;  // switch offset within the interval, in (0, 5]
  bool manual = false;
  Mode mode = Mode::Heat;
  double prev_degF = 0;
  double new_degF = 0;
};

struct TrueMsc {
  Minute slot = 0;
  double planted_ttd_minutes = 0;   // continuous draw from the law
  double realized_ttd_minutes = 0;  // grid-quantized elapsed time actually emitted
  double dod_degF = 0;
  int episode_class = 2;  // index into MentalModelClass
  bool follow_up = false;
};

struct TrueHome {
  std::string id;
  Mode mode = Mode::Heat;
  TempUnit unit = TempUnit::Fahrenheit;
  double comfort_degF = 70;
  std::vector<std::pair<Minute, Minute>> occupancy;  // [start, end) merged intervals
  std::vector<TrueChange> changes;
  std::vector<TrueMsc> mscs;
  std::array<std::size_t, 3> episode_counts{};
};

struct GroundTruth {
  SynthConfig config;
  std::vector<TrueHome> homes;
  std::string to_json() const;
};

struct SynthHome {
  HomeMeta meta;
  std::vector<Sample> samples;
};

struct SynthResult {
  std::vector<SynthHome> homes;
  GroundTruth truth;
};

// Deterministic under the config seed; per-home sub-seeds make generation
// order-independent.
SynthResult generate(const SynthConfig& cfg);

// Emits the corpus in the same CSV schema the ingest module reads:
// <dir>/home_<id>.csv per home, <dir>/metadata.csv, <dir>/ground_truth.json.
void write_corpus(const SynthResult& result, const std::string& dir);

// What the pipeline produced for one home, for oracle comparison.
struct HomePipelineView {
  const std::vector<SetpointChange>* changes = nullptr;
  const std::vector<MscFeature>* mscs = nullptr;
  const std::vector<char>* occupancy_filtered = nullptr;
  Minute series_start = 0;  // timestamp of sample index 0
};

struct DiscrepancyReport {
  std::size_t true_sc = 0, detected_sc = 0, matched_sc = 0;
  double sc_recall = 0, sc_precision = 0;
  std::size_t cause_correct = 0;
  double cause_accuracy = 0;
  double occupancy_recall = 0;
  std::size_t matched_msc = 0;
  double mean_abs_dod_error = 0;
  double mean_abs_ttd_error = 0;
  bool fit_compared = false;
  double fitted_a_rel_err = 0, fitted_b_rel_err = 0;
  std::string to_json() const;
};

// Per-stage recall/precision against ground truth. Throws if the home sets
// do not match.
DiscrepancyReport oracle_compare(const GroundTruth& truth,
                                 const std::map<std::string, HomePipelineView>& pipeline,
                                 const std::vector<OverrideModel>& fitted_models = {});

}  // namespace ttdkit
