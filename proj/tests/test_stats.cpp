#include <random>

#include "doctest.h"
#include "json.hpp"
#include "ttdkit/stats.hpp"

using namespace ttdkit;

TEST_CASE("1-D histogram binning and overflow") {
  auto h = Histogram1D::uniform(0, 240, 48);
  h.add(0);
  h.add(4.9);
  h.add(5);
  h.add(239.9);
  h.add(240);   // overflow (edge exclusive)
  h.add(-0.1);  // underflow
  CHECK(h.counts()[0] == 2);
  CHECK(h.counts()[1] == 1);
  CHECK(h.counts()[47] == 1);
  CHECK(h.overflow() == 1);
  CHECK(h.underflow() == 1);
  CHECK(h.total() == 6);
}

TEST_CASE("histogram merge equals pooled accumulation; config mismatch throws") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-10, 250);
  auto a = Histogram1D::uniform(0, 240, 48);
  auto b = Histogram1D::uniform(0, 240, 48);
  auto pooled = Histogram1D::uniform(0, 240, 48);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    (i % 2 ? a : b).add(x);
    pooled.add(x);
  }
  a.merge(b);
  CHECK(a.counts() == pooled.counts());
  CHECK(a.underflow() == pooled.underflow());
  CHECK(a.overflow() == pooled.overflow());

  auto other = Histogram1D::uniform(0, 240, 24);
  CHECK_THROWS_AS(a.merge(other), MergeError);
}

TEST_CASE("2-D histogram clamps out-of-range to edge bins") {
  Histogram2D h({0, 720, 1440}, {0, 90, 180});
  h.add(100, 50);
  h.add(-5, 400);   // clamps to x bin 0, y bin 1
  h.add(2000, -1);  // clamps to x bin 1, y bin 0
  CHECK(h.counts()[0] == 1);
  CHECK(h.counts()[1] == 1);
  CHECK(h.counts()[2] == 1);
  CHECK(h.total() == 3);
}

TEST_CASE("quantile surface bin centers") {
  CHECK(QuantileSurface::bin_center(2.0) == 2);
  CHECK(QuantileSurface::bin_center(2.4) == 2);
  CHECK(QuantileSurface::bin_center(-2.4) == -2);
  CHECK(QuantileSurface::bin_center(0.9) == 1);
  CHECK(QuantileSurface::bin_center(0.2) == 1);   // tiny magnitudes round out to 1
  CHECK(QuantileSurface::bin_center(-0.2) == -1);
  CHECK(QuantileSurface::centers().size() == 20);
}

TEST_CASE("quantile surface order statistics, cdf, truncation, overflow") {
  QuantileSurface s;
  for (double t : {10.0, 20.0, 30.0, 40.0}) s.add(2.0, t);
  s.add(-3.0, 15.0);
  s.add(12.0, 99.0);  // beyond +/-10: overflow
  CHECK(s.n(2) == 4);
  CHECK(s.n(-3) == 1);
  CHECK(s.overflow_n(true) == 1);
  CHECK(s.quantile(2, 0.5) == 25.0);
  CHECK(s.quantile(2, 0.0) == 10.0);
  CHECK(s.quantile(2, 1.0) == 40.0);
  CHECK(s.cdf(2, 25.0) == 0.5);
  CHECK(s.cdf(2, 9.0) == 0.0);
  CHECK(s.cdf(2, 40.0) == 1.0);
  CHECK(s.samples_above(2, 10.0) == std::vector<double>{20, 30, 40});
  CHECK(s.samples_above(2, -1.0).size() == 4);

  QuantileSurface other;
  other.add(2.0, 50.0);
  s.merge(other);
  CHECK(s.n(2) == 5);
  CHECK(s.quantile(2, 0.5) == 30.0);
}

TEST_CASE("interpolated quantile on a known set") {
  std::vector<double> v{10, 20, 40};
  CHECK(interpolated_quantile(v, 0.5) == 20);
  CHECK(interpolated_quantile(v, 0.25) == 15);
  CHECK(interpolated_quantile(v, 0.75) == 30);
  CHECK_THROWS(interpolated_quantile({}, 0.5));
}

namespace {
MscFeature mk(double dod, double ttd, Mode mode = Mode::Heat, bool occupied = true,
              int tod = 600, bool weekend = false) {
  MscFeature f;
  f.home_id = "h";
  f.sc.manual = true;
  f.dod = dod;
  f.ttd_minutes = ttd;
  f.continuously_occupied = occupied;
  f.within_2h = ttd < 120;
  f.season_mode = mode;
  f.energy_impact = classify_energy_impact(mode, dod);
  f.tod_minutes = tod;
  f.weekend = weekend;
  return f;
}
}  // namespace

TEST_CASE("stats bundle accumulation rules") {
  StatsBundle s;
  s.accumulate(mk(2, 20));               // heat intensive, in surface
  s.accumulate(mk(-1, 15));              // heat saving, in surface (negative bin)
  s.accumulate(mk(-2, 30, Mode::Cool));  // cool intensive
  s.accumulate(mk(3, 40, Mode::Heat, /*occupied=*/false));  // no ttd stats
  auto unocc_no_ttd = mk(4, 0);
  unocc_no_ttd.ttd_minutes.reset();  // no prior SC
  s.accumulate(unocc_no_ttd);
  s.accumulate(mk(2, 130));  // occupied but beyond 2 h: hist yes, surface no

  CHECK(s.msc_total == 6);
  CHECK(s.ttd_n == 4);
  CHECK(s.surface_heat.n(2) == 1);
  CHECK(s.surface_heat.n(-1) == 1);
  CHECK(s.surface_cool.n(-2) == 1);
  CHECK(s.intensive_heat == 4);
  CHECK(s.saving_heat == 1);
  CHECK(s.intensive_cool == 1);
  CHECK(s.ttd_sum == doctest::Approx(20 + 15 + 30 + 130));
  CHECK(s.ttd_n_over10 == 4);

  s.accumulate(mk(1, 5));  // first-peak sample: counted in mean, not in excl-peak mean
  CHECK(s.ttd_n == 5);
  CHECK(s.ttd_n_over10 == 4);
}

TEST_CASE("bundle merge equals serial accumulation bit-exactly") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> dod(-8, 8);
  std::uniform_real_distribution<double> ttd(1, 200);
  std::vector<MscFeature> feats;
  for (int i = 0; i < 500; ++i) {
    double d = dod(rng);
    if (std::fabs(d) < 0.1) d = 1;
    feats.push_back(mk(d, ttd(rng), rng() % 2 ? Mode::Heat : Mode::Cool, rng() % 4 != 0,
                       static_cast<int>(rng() % 1440), rng() % 7 < 2));
  }
  StatsBundle serial;
  for (const auto& f : feats) serial.accumulate(f);
  serial.add_home(30.0);

  // random 3-way shard partition
  StatsBundle a, b, c;
  for (const auto& f : feats) {
    switch (rng() % 3) {
      case 0: a.accumulate(f); break;
      case 1: b.accumulate(f); break;
      default: c.accumulate(f); break;
    }
  }
  a.add_home(30.0);
  a.merge(b);
  a.merge(c);

  CHECK(a.msc_total == serial.msc_total);
  CHECK(a.ttd_n == serial.ttd_n);
  CHECK(a.ttd_hist.counts() == serial.ttd_hist.counts());
  CHECK(a.dod_heat.counts() == serial.dod_heat.counts());
  CHECK(a.tod_weekday.counts() == serial.tod_weekday.counts());
  CHECK(a.tod_duration.counts() == serial.tod_duration.counts());
  CHECK(a.prior_event_counts == serial.prior_event_counts);
  for (int k : QuantileSurface::centers()) {
    CHECK(a.surface_heat.n(k) == serial.surface_heat.n(k));
    if (a.surface_heat.n(k)) {
      CHECK(a.surface_heat.quantile(k, 0.5) == serial.surface_heat.quantile(k, 0.5));
    }
  }
  // the report built from the merged bundle is byte-identical
  CHECK(Report{a, 30, 0}.to_json() == Report{serial, 30, 0}.to_json());
}

TEST_CASE("report JSON is well-formed and carries the headline scalars") {
  StatsBundle s;
  s.accumulate(mk(2, 20));
  s.accumulate(mk(2, 5));
  s.add_home(10.0);
  const Report rep{s, 30, 42};
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["window_minutes"] == 30);
  CHECK(j["seed"] == 42);
  CHECK(j["n"]["homes"] == 1);
  CHECK(j["n"]["msc"] == 2);
  CHECK(j["scalars"]["mean_msc_per_day"].get<double>() == doctest::Approx(0.2));
  CHECK(j["scalars"]["mean_ttd_minutes"].get<double>() == doctest::Approx(12.5));
  CHECK(j["scalars"]["mean_ttd_minutes_excl_first_peak"].get<double>() == doctest::Approx(20));
  REQUIRE(j["surface_heat"].size() == 1);
  CHECK(j["surface_heat"][0]["dod"] == 2);
  CHECK(j["surface_heat"][0]["low_confidence"] == true);
}
