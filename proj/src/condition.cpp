#include "ttdkit/condition.hpp"

#include <cmath>
#include <sstream>

#include "ttdkit/csv.hpp"

namespace ttdkit {
namespace {

bool near_multiple(double value, double increment, double tol) {
  const double r = std::fabs(std::remainder(value, increment));
  return r < tol;
}

double round_to_increment(double value, double increment) {
  return std::round(value / increment) * increment;
}

}  // namespace

TempUnit detect_unit(std::span<const double> deltas_degF, double tol, std::size_t min_deltas,
                     double majority) {
  if (deltas_degF.size() < min_deltas) return TempUnit::Unknown;
  std::size_t pass_f = 0, pass_c = 0;
  for (double d : deltas_degF) {
    if (near_multiple(d, 1.0, tol)) ++pass_f;
    if (near_multiple(d / 1.8, 0.5, tol)) ++pass_c;  // delta in degC
  }
  const double n = static_cast<double>(deltas_degF.size());
  const bool is_f = static_cast<double>(pass_f) >= majority * n;
  const bool is_c = static_cast<double>(pass_c) >= majority * n;
  if (is_f == is_c) return TempUnit::Unknown;
  return is_f ? TempUnit::Fahrenheit : TempUnit::Celsius;
}

DeaverageResult deaverage_setpoints(std::span<const double> series, double increment,
                                    double tol) {
  DeaverageResult result;
  result.corrected.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double v = series[i];
    if (near_multiple(v, increment, tol)) {
      result.corrected.push_back(v);
      continue;
    }
    if (i == 0) {
      const double est = round_to_increment(v, increment);
      result.corrected.push_back(est);
      result.records.push_back({i, est, v, est, true});
      continue;
    }
    const double x0 = result.corrected.back();
    const double est = round_to_increment(2.0 * v - x0, increment);
    result.corrected.push_back(est);
    result.records.push_back({i, x0, v, est, false});
  }
  return result;
}

std::string deaverage_records_json(const std::vector<DeaverageRecord>& records) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DeaverageRecord& r = records[i];
    if (i) os << ",";
    os << "{\"index\":" << r.index << ",\"x0\":" << fmt_num(r.x0)
       << ",\"x_tilde\":" << fmt_num(r.x_tilde) << ",\"x1_est\":" << fmt_num(r.x1_est)
       << ",\"dt_assumed\":2.5,\"first_sample\":" << (r.first_sample ? "true" : "false") << "}";
  }
  os << "]";
  return os.str();
}

std::vector<char> fill_occupancy(const std::vector<char>& motion,
                                 const OccupancyFilterConfig& cfg) {
  std::vector<char> out = motion;
  if (cfg.window_minutes <= 0) return out;
  const std::size_t max_gap = static_cast<std::size_t>(cfg.window_minutes / 5);
  std::size_t i = 0;
  const std::size_t n = out.size();
  // Locate each maximal false run bounded by true samples.
  while (i < n) {
    if (!out[i]) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && !out[j]) ++j;
    if (j >= n) break;  // trailing false run, never filled
    const std::size_t gap = j - i - 1;
    if (gap > 0 && gap <= max_gap) {
      for (std::size_t k = i + 1; k < j; ++k) out[k] = 1;
    }
    i = j;
  }
  return out;
}

std::vector<OccupancySegment> segment_occupancy(const std::vector<char>& filtered,
                                                const std::vector<char>& raw) {
  std::vector<OccupancySegment> segments;
  const std::size_t n = filtered.size();
  std::size_t i = 0;
  while (i < n) {
    if (!filtered[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && filtered[j + 1]) ++j;
    OccupancySegment seg{i, j, 0};
    if (raw.size() == n) {
      for (std::size_t k = i; k <= j; ++k)
        if (!raw[k]) seg.filled_minutes += 5;
    }
    segments.push_back(seg);
    i = j + 1;
  }
  return segments;
}

}  // namespace ttdkit
