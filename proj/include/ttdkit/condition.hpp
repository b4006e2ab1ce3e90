#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ttdkit {

enum class TempUnit { Fahrenheit, Celsius, Unknown };

// Setpoint increment in the unit's own scale: 1.0 degF or 0.5 degC.
inline double unit_increment(TempUnit u) { return u == TempUnit::Celsius ? 0.5 : 1.0; }

// Classifies a user's temperature unit from nonzero setpoint deltas given in
// physical degF. A unit wins when at least `majority` of the deltas land
// within `tol` of its increment grid and the other unit's test fails. Too few
// deltas, both tests passing (every 5 degC multiple is also a whole degF
// change), or both failing yield Unknown.
TempUnit detect_unit(std::span<const double> deltas_degF, double tol = 0.001,
                     std::size_t min_deltas = 5, double majority = 0.95);

struct DeaverageRecord {
  std::size_t index = 0;
  double x0 = 0.0;       // setpoint at the previous sample
  double x_tilde = 0.0;  // sampled time-average
  double x1_est = 0.0;   // estimated true setpoint, on the increment grid
  bool first_sample = false;
  static constexpr double dt_assumed_minutes = 2.5;
};

struct DeaverageResult {
  std::vector<double> corrected;
  std::vector<DeaverageRecord> records;
};

// Undoes the sampler's time-averaging of setpoints. A sampled value off the
// increment grid is replaced by 2*x_tilde - x0 (the mid-interval switch
// estimate), rounded to the nearest increment; the previous *corrected* value
// serves as x0 so consecutive off-grid samples correct sequentially. On-grid
// samples pass through unchanged. An off-grid first sample is rounded and
// flagged. Values and `increment` are in the user's native unit.
DeaverageResult deaverage_setpoints(std::span<const double> series, double increment,
                                    double tol = 0.001);

std::string deaverage_records_json(const std::vector<DeaverageRecord>& records);

struct OccupancyFilterConfig {
  int window_minutes = 30;  // W; must be a non-negative multiple of 5
};

// Gap-filling occupancy filter: every maximal run of false samples lasting at
// most W minutes and bounded by true samples on both sides becomes true.
// Leading/trailing false runs are never filled.
std::vector<char> fill_occupancy(const std::vector<char>& motion,
                                 const OccupancyFilterConfig& cfg);

struct OccupancySegment {
  std::size_t first = 0;  // sample indices, inclusive
  std::size_t last = 0;
  int filled_minutes = 0;
  int duration_minutes() const { return static_cast<int>(last - first + 1) * 5; }
};

// One segment per maximal true run. When the raw (pre-filter) sequence is
// supplied, filled_minutes counts the filter's contribution per segment.
std::vector<OccupancySegment> segment_occupancy(const std::vector<char>& filtered,
                                                const std::vector<char>& raw = {});

}  // namespace ttdkit
