#include "ttdkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ttdkit/csv.hpp"

namespace ttdkit {

Histogram1D::Histogram1D(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("histogram needs at least two edges");
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i] <= edges_[i - 1]) throw std::invalid_argument("edges must strictly increase");
  counts_.assign(edges_.size() - 1, 0);
}

Histogram1D Histogram1D::uniform(double lo, double hi, int bins) {
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(bins) + 1);
  const double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) edges.push_back(lo + w * i);
  return Histogram1D(std::move(edges));
}

void Histogram1D::add(double x, std::uint64_t count) {
  if (x < edges_.front()) {
    underflow_ += count;
    return;
  }
  if (x >= edges_.back()) {
    overflow_ += count;
    return;
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  counts_[static_cast<std::size_t>(it - edges_.begin()) - 1] += count;
}

void Histogram1D::merge(const Histogram1D& other) {
  if (edges_ != other.edges_) throw MergeError("histogram bin configurations differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  underflow_ += other.underflow_;
  overflow_ += other.overflow_;
}

std::uint64_t Histogram1D::total() const {
  std::uint64_t t = underflow_ + overflow_;
  for (std::uint64_t c : counts_) t += c;
  return t;
}

Histogram2D::Histogram2D(std::vector<double> x_edges, std::vector<double> y_edges)
    : x_edges_(std::move(x_edges)), y_edges_(std::move(y_edges)) {
  if (x_edges_.size() < 2 || y_edges_.size() < 2)
    throw std::invalid_argument("histogram needs at least two edges per axis");
  counts_.assign((x_edges_.size() - 1) * (y_edges_.size() - 1), 0);
}

namespace {
std::size_t clamp_bin(const std::vector<double>& edges, double v) {
  if (v < edges.front()) return 0;
  if (v >= edges.back()) return edges.size() - 2;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}
}  // namespace

void Histogram2D::add(double x, double y, std::uint64_t count) {
  const std::size_t nx = y_edges_.size() - 1;
  counts_[clamp_bin(x_edges_, x) * nx + clamp_bin(y_edges_, y)] += count;
}

void Histogram2D::merge(const Histogram2D& other) {
  if (x_edges_ != other.x_edges_ || y_edges_ != other.y_edges_)
    throw MergeError("2-D histogram bin configurations differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::uint64_t Histogram2D::total() const {
  std::uint64_t t = 0;
  for (std::uint64_t c : counts_) t += c;
  return t;
}

int QuantileSurface::bin_center(double dod) {
  // Quantize to the wire format's 4 decimals first so values that sit on a
  // bin boundary (e.g. a 4.5 degF change from a half-degC home) bin the same
  // whether they arrive exact or through a CSV round trip.
  const double mag = std::round(std::fabs(dod) * 1e4) / 1e4;
  int k = static_cast<int>(std::lround(mag));
  if (k == 0) k = 1;  // nonzero by contract; tiny magnitudes round away from zero
  return dod < 0 ? -k : k;
}

const std::vector<double>& QuantileSurface::bin(int center) const {
  // index 0..9 = centers -10..-1, 10..19 = centers +1..+10
  const std::size_t idx =
      center < 0 ? static_cast<std::size_t>(kMaxMagnitude + center)
                 : static_cast<std::size_t>(kMaxMagnitude + center - 1);
  return bins_[idx];
}

std::vector<double>& QuantileSurface::bin(int center) {
  return const_cast<std::vector<double>&>(
      static_cast<const QuantileSurface*>(this)->bin(center));
}

void QuantileSurface::add(double dod, double ttd_minutes) {
  const int k = static_cast<int>(std::lround(std::fabs(dod)));
  if (k > kMaxMagnitude) {
    (dod < 0 ? overflow_neg_ : overflow_pos_).push_back(ttd_minutes);
    return;
  }
  bin(bin_center(dod)).push_back(ttd_minutes);
  sorted_ = false;
}

void QuantileSurface::merge(const QuantileSurface& other) {
  for (std::size_t i = 0; i < bins_.size(); ++i)
    bins_[i].insert(bins_[i].end(), other.bins_[i].begin(), other.bins_[i].end());
  overflow_pos_.insert(overflow_pos_.end(), other.overflow_pos_.begin(),
                       other.overflow_pos_.end());
  overflow_neg_.insert(overflow_neg_.end(), other.overflow_neg_.begin(),
                       other.overflow_neg_.end());
  sorted_ = false;
}

void QuantileSurface::ensure_sorted() const {
  if (sorted_) return;
  for (auto& b : bins_) std::sort(b.begin(), b.end());
  sorted_ = true;
}

std::size_t QuantileSurface::n(int center) const { return bin(center).size(); }

std::size_t QuantileSurface::overflow_n(bool positive) const {
  return positive ? overflow_pos_.size() : overflow_neg_.size();
}

double interpolated_quantile(std::vector<double> sorted_samples, double level) {
  if (sorted_samples.empty()) throw std::invalid_argument("quantile of empty sample set");
  if (level <= 0) return sorted_samples.front();
  if (level >= 1) return sorted_samples.back();
  const double pos = level * static_cast<double>(sorted_samples.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted_samples.size()) return sorted_samples[lo];
  return sorted_samples[lo] + frac * (sorted_samples[lo + 1] - sorted_samples[lo]);
}

double QuantileSurface::quantile(int center, double level) const {
  ensure_sorted();
  return interpolated_quantile(bin(center), level);
}

double QuantileSurface::cdf(int center, double horizon_minutes) const {
  ensure_sorted();
  const auto& b = bin(center);
  if (b.empty()) throw std::invalid_argument("empty DoD bin");
  const auto it = std::upper_bound(b.begin(), b.end(), horizon_minutes);
  return static_cast<double>(it - b.begin()) / static_cast<double>(b.size());
}

std::vector<double> QuantileSurface::samples_above(int center, double min_minutes) const {
  ensure_sorted();
  const auto& b = bin(center);
  const auto it = std::upper_bound(b.begin(), b.end(), min_minutes);
  return std::vector<double>(it, b.end());
}

std::vector<int> QuantileSurface::centers() {
  std::vector<int> out;
  for (int k = -kMaxMagnitude; k <= kMaxMagnitude; ++k)
    if (k != 0) out.push_back(k);
  return out;
}

void StatsBundle::accumulate(const MscFeature& msc) {
  ++msc_total;
  (msc.weekend ? tod_weekend : tod_weekday).add(msc.tod_minutes);
  if (msc.duration_to_next_sc_minutes)
    tod_duration.add(msc.tod_minutes, *msc.duration_to_next_sc_minutes);

  std::string prior = "none";
  if (msc.sc.has_prior) prior = msc.sc.prior_manual ? "manual" : to_string(msc.sc.prior_event);
  ++prior_event_counts[prior];

  (msc.season_mode == Mode::Heat ? dod_heat : dod_cool).add(msc.dod);
  if (msc.season_mode == Mode::Heat) {
    (msc.energy_impact == EnergyImpact::Intensive ? intensive_heat : saving_heat) += 1;
  } else {
    (msc.energy_impact == EnergyImpact::Intensive ? intensive_cool : saving_cool) += 1;
  }

  if (msc.ttd_minutes && msc.continuously_occupied) {
    ttd_hist.add(*msc.ttd_minutes);
    ttd_sum += *msc.ttd_minutes;
    ++ttd_n;
    if (*msc.ttd_minutes > 10.0) {
      ttd_sum_over10 += *msc.ttd_minutes;
      ++ttd_n_over10;
    }
    if (msc.within_2h) {
      (msc.season_mode == Mode::Heat ? surface_heat : surface_cool).add(msc.dod,
                                                                        *msc.ttd_minutes);
    }
  }
}

void StatsBundle::add_home(double days_observed) {
  ++home_count;
  observation_days += days_observed;
}

void StatsBundle::merge(const StatsBundle& other) {
  tod_weekday.merge(other.tod_weekday);
  tod_weekend.merge(other.tod_weekend);
  ttd_hist.merge(other.ttd_hist);
  tod_duration.merge(other.tod_duration);
  dod_heat.merge(other.dod_heat);
  dod_cool.merge(other.dod_cool);
  surface_heat.merge(other.surface_heat);
  surface_cool.merge(other.surface_cool);
  for (const auto& [k, v] : other.prior_event_counts) prior_event_counts[k] += v;
  intensive_heat += other.intensive_heat;
  saving_heat += other.saving_heat;
  intensive_cool += other.intensive_cool;
  saving_cool += other.saving_cool;
  msc_total += other.msc_total;
  home_count += other.home_count;
  observation_days += other.observation_days;
  ttd_sum += other.ttd_sum;
  ttd_n += other.ttd_n;
  ttd_sum_over10 += other.ttd_sum_over10;
  ttd_n_over10 += other.ttd_n_over10;
}

namespace {

void append_hist(std::ostringstream& os, const char* name, const Histogram1D& h) {
  os << "\"" << name << "\":{\"edges\":[";
  for (std::size_t i = 0; i < h.edges().size(); ++i) {
    if (i) os << ",";
    os << fmt_num(h.edges()[i]);
  }
  os << "],\"counts\":[";
  for (std::size_t i = 0; i < h.counts().size(); ++i) {
    if (i) os << ",";
    os << h.counts()[i];
  }
  os << "],\"underflow\":" << h.underflow() << ",\"overflow\":" << h.overflow() << "}";
}

void append_surface(std::ostringstream& os, const char* name, const QuantileSurface& s,
                    std::size_t low_confidence_n = 30) {
  os << "\"" << name << "\":[";
  bool first = true;
  for (int c : QuantileSurface::centers()) {
    if (s.n(c) == 0) continue;
    if (!first) os << ",";
    first = false;
    os << "{\"dod\":" << c << ",\"n\":" << s.n(c)
       << ",\"ttd_p50\":" << fmt_num(s.quantile(c, 0.5))
       << ",\"low_confidence\":" << (s.n(c) < low_confidence_n ? "true" : "false") << "}";
  }
  os << "]";
}

double ratio(std::uint64_t a, std::uint64_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

std::string Report::to_json() const {
  std::ostringstream os;
  const StatsBundle& s = stats;
  os << "{";
  os << "\"window_minutes\":" << window_minutes << ",\"seed\":" << seed;
  os << ",\"n\":{\"homes\":" << s.home_count << ",\"msc\":" << s.msc_total
     << ",\"observation_days\":" << fmt_num(s.observation_days) << "}";
  os << ",\"scalars\":{";
  os << "\"mean_msc_per_day\":"
     << fmt_num(s.observation_days > 0 ? static_cast<double>(s.msc_total) / s.observation_days
                                       : 0.0);
  os << ",\"mean_ttd_minutes\":" << fmt_num(s.ttd_n ? s.ttd_sum / s.ttd_n : 0.0);
  os << ",\"mean_ttd_minutes_excl_first_peak\":"
     << fmt_num(s.ttd_n_over10 ? s.ttd_sum_over10 / s.ttd_n_over10 : 0.0);
  os << ",\"intensive_fraction_heat\":"
     << fmt_num(ratio(s.intensive_heat, s.intensive_heat + s.saving_heat));
  os << ",\"intensive_fraction_cool\":"
     << fmt_num(ratio(s.intensive_cool, s.intensive_cool + s.saving_cool));
  os << ",\"ttd_n\":" << s.ttd_n << "}";

  os << ",\"prior_event_fractions\":{";
  std::uint64_t prior_total = 0;
  for (const auto& [k, v] : s.prior_event_counts) prior_total += v;
  bool first = true;
  for (const auto& [k, v] : s.prior_event_counts) {
    if (!first) os << ",";
    first = false;
    os << "\"" << k << "\":" << fmt_num(ratio(v, prior_total));
  }
  os << "}";

  os << ",";
  append_hist(os, "tod_weekday", s.tod_weekday);
  os << ",";
  append_hist(os, "tod_weekend", s.tod_weekend);
  os << ",";
  append_hist(os, "ttd_hist", s.ttd_hist);
  os << ",";
  append_hist(os, "dod_heat", s.dod_heat);
  os << ",";
  append_hist(os, "dod_cool", s.dod_cool);
  os << ",";
  append_surface(os, "surface_heat", s.surface_heat);
  os << ",";
  append_surface(os, "surface_cool", s.surface_cool);
  os << "}";
  return os.str();
}

void Report::write_figure_csvs(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const StatsBundle& s = stats;

  auto write_1d = [&](const std::string& name, const Histogram1D& h, const char* xlabel) {
    std::ofstream out(fs::path(dir) / name);
    out << xlabel << ",count\n";
    for (std::size_t i = 0; i < h.counts().size(); ++i)
      out << fmt_num(h.edges()[i]) << ',' << h.counts()[i] << '\n';
    out << "overflow," << h.overflow() << '\n';
  };

  write_1d("tod_weekday.csv", s.tod_weekday, "tod_minutes");
  write_1d("tod_weekend.csv", s.tod_weekend, "tod_minutes");
  write_1d("ttd_hist.csv", s.ttd_hist, "ttd_minutes");
  write_1d("dod_heat.csv", s.dod_heat, "dod_degF");
  write_1d("dod_cool.csv", s.dod_cool, "dod_degF");

  {
    std::ofstream out(fs::path(dir) / "tod_duration.csv");
    out << "tod_minutes,duration_class,count\n";
    const auto& h = s.tod_duration;
    const std::size_t ny = h.y_edges().size() - 1;
    static const char* kClasses[] = {"lt_1.5h", "1.5_3h", "3_6h", "6_12h", "gt_12h"};
    for (std::size_t i = 0; i + 1 < h.x_edges().size(); ++i)
      for (std::size_t j = 0; j < ny; ++j)
        out << fmt_num(h.x_edges()[i]) << ',' << kClasses[j] << ',' << h.counts()[i * ny + j]
            << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "prior_event.csv");
    out << "prior,count\n";
    for (const auto& [k, v] : s.prior_event_counts) out << k << ',' << v << '\n';
  }
  auto write_surface = [&](const std::string& name, const QuantileSurface& surf) {
    std::ofstream out(fs::path(dir) / name);
    out << "dod_degF,n";
    for (int q = 1; q <= 9; ++q) out << ",ttd_p" << q * 10;
    out << '\n';
    for (int c : QuantileSurface::centers()) {
      if (surf.n(c) == 0) continue;
      out << c << ',' << surf.n(c);
      for (int q = 1; q <= 9; ++q) out << ',' << fmt_num(surf.quantile(c, q / 10.0));
      out << '\n';
    }
  };
  write_surface("surface_heat.csv", s.surface_heat);
  write_surface("surface_cool.csv", s.surface_cool);
}

}  // namespace ttdkit
