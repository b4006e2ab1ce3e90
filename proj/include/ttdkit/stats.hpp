#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttdkit/features.hpp"

namespace ttdkit {

class MergeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Histogram1D {
 public:
  Histogram1D() = default;
  explicit Histogram1D(std::vector<double> edges);
  static Histogram1D uniform(double lo, double hi, int bins);

  void add(double x, std::uint64_t count = 1);
  void merge(const Histogram1D& other);

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t underflow() const { return underflow_; }
  std::uint64_t overflow() const { return overflow_; }
  std::uint64_t total() const;

 private:
  std::vector<double> edges_;  // strictly increasing; bin i = [edges[i], edges[i+1])
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
};

class Histogram2D {
 public:
  Histogram2D() = default;
  Histogram2D(std::vector<double> x_edges, std::vector<double> y_edges);

  void add(double x, double y, std::uint64_t count = 1);
  void merge(const Histogram2D& other);

  const std::vector<double>& x_edges() const { return x_edges_; }
  const std::vector<double>& y_edges() const { return y_edges_; }
  // Row-major [x_bin * ny + y_bin]; out-of-range values land in the nearest
  // edge bin so nothing is dropped silently.
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const;

 private:
  std::vector<double> x_edges_;
  std::vector<double> y_edges_;
  std::vector<std::uint64_t> counts_;
};

// Per-DoD-bin TTD sample store: 1 degF-wide bins centered on -10..-1, 1..10,
// with magnitudes beyond 10 kept in overflow bins. Samples are retained so
// quantiles are exact order statistics.
class QuantileSurface {
 public:
  static constexpr int kMaxMagnitude = 10;

  // Signed bin center for a DoD value, e.g. -2 for dod in [-2.5, -1.5).
  // Magnitudes below 0.5 round away from zero to +/-1.
  static int bin_center(double dod);

  void add(double dod, double ttd_minutes);
  void merge(const QuantileSurface& other);

  std::size_t n(int center) const;
  std::size_t overflow_n(bool positive) const;
  // Linear-interpolation quantile of the retained samples; requires n > 0.
  double quantile(int center, double level) const;
  // Fraction of samples <= horizon_minutes; requires n > 0.
  double cdf(int center, double horizon_minutes) const;
  // Samples strictly greater than `min_minutes` (lower truncation).
  std::vector<double> samples_above(int center, double min_minutes) const;

  static std::vector<int> centers();

 private:
  const std::vector<double>& bin(int center) const;
  std::vector<double>& bin(int center);
  mutable std::vector<std::vector<double>> bins_ =
      std::vector<std::vector<double>>(2 * kMaxMagnitude);
  std::vector<double> overflow_pos_;
  std::vector<double> overflow_neg_;
  mutable bool sorted_ = true;
  void ensure_sorted() const;
};

double interpolated_quantile(std::vector<double> sorted_samples, double level);

// The full accumulator family for the population statistics. Single-writer;
// parallel runs shard per home and merge.
struct StatsBundle {
  // Time-of-day of manual changes, 30-min bins, split weekday/weekend.
  Histogram1D tod_weekday = Histogram1D::uniform(0, 1440, 48);
  Histogram1D tod_weekend = Histogram1D::uniform(0, 1440, 48);
  // TTD over occupied manual changes, 5-min bins to 240 min plus overflow.
  Histogram1D ttd_hist = Histogram1D::uniform(0, 240, 48);
  // Duration to the next SC: time-of-day x log-spaced duration classes
  // (<1.5 h, 1.5-3, 3-6, 6-12, >12 h; the last is the overflow row).
  Histogram2D tod_duration = Histogram2D(Histogram1D::uniform(0, 1440, 48).edges(),
                                         {0, 90, 180, 360, 720, 1e9});
  // Seasonal DoD distributions, 1 degF bins.
  Histogram1D dod_heat = Histogram1D::uniform(-10, 10, 20);
  Histogram1D dod_cool = Histogram1D::uniform(-10, 10, 20);

  QuantileSurface surface_heat;
  QuantileSurface surface_cool;

  std::map<std::string, std::uint64_t> prior_event_counts;
  std::uint64_t intensive_heat = 0, saving_heat = 0;
  std::uint64_t intensive_cool = 0, saving_cool = 0;

  std::uint64_t msc_total = 0;
  std::uint64_t home_count = 0;
  double observation_days = 0.0;

  double ttd_sum = 0.0;
  std::uint64_t ttd_n = 0;
  double ttd_sum_over10 = 0.0;  // excluding the first peak (ttd <= 10)
  std::uint64_t ttd_n_over10 = 0;

  void accumulate(const MscFeature& msc);
  void add_home(double days_observed);
  void merge(const StatsBundle& other);
};

struct Report {
  StatsBundle stats;  // finalized accumulators
  int window_minutes = 30;
  std::uint64_t seed = 0;

  std::string to_json() const;
  // Per-figure plot-data CSVs, written into `dir` (created if needed).
  void write_figure_csvs(const std::string& dir) const;
};

}  // namespace ttdkit
