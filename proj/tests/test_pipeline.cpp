#include <cmath>
#include <filesystem>
#include <map>

#include "doctest.h"
#include "ttdkit/pipeline.hpp"
#include "ttdkit/synth.hpp"

using namespace ttdkit;
namespace fs = std::filesystem;

namespace {

PipelineConfig default_cfg() {
  PipelineConfig cfg;
  cfg.cohort.min_msc_count = 1;
  return cfg;
}

Corpus to_corpus(SynthResult&& r) {
  Corpus corpus;
  for (auto& home : r.homes) corpus.emplace_back(home.meta, std::move(home.samples));
  return corpus;
}

std::map<std::string, HomePipelineView> views_of(const CorpusResult& r) {
  std::map<std::string, HomePipelineView> views;
  for (const HomeResult& h : r.homes) {
    views[h.meta.home_id] = {&h.changes, &h.features, &h.occupancy_filtered, h.series_start};
  }
  return views;
}

}  // namespace

TEST_CASE("unit-detection deltas skip averaged transients") {
  std::vector<Sample> s;
  const std::vector<double> heat = {70, 70, 71.2, 72, 72, 72, 69.3, 68, 68};
  for (std::size_t i = 0; i < heat.size(); ++i) {
    Sample x;
    x.time = 5 * static_cast<Minute>(i + 1);
    x.heat_setpoint = heat[i];
    x.cool_setpoint = 85;
    s.push_back(x);
  }
  // stable heat values: 70, 72, 68; the constant cool column contributes none
  CHECK(setpoint_unit_deltas(s) == std::vector<double>{2, -4});
}

TEST_CASE("per-home pipeline on a synthetic Fahrenheit home") {
  SynthConfig cfg;
  cfg.seed = 5;
  cfg.n_homes = 1;
  cfg.duration_days = 14;
  cfg.celsius_fraction = 0;
  auto r = generate(cfg);
  HomeResult h =
      process_home(r.homes[0].meta, r.homes[0].samples, default_cfg(), /*keep=*/true);
  CHECK(h.unit == TempUnit::Fahrenheit);
  CHECK(h.observed_days == doctest::Approx(14.0));
  CHECK(h.msc_count() > 0);
  CHECK(h.conditioned.size() == r.homes[0].samples.size());
  // conditioning leaves every setpoint on the 1 degF grid
  for (const Sample& s : h.conditioned) {
    CHECK(std::fabs(s.heat_setpoint - std::round(s.heat_setpoint)) < 1e-9);
    CHECK(std::fabs(s.cool_setpoint - std::round(s.cool_setpoint)) < 1e-9);
  }
}

TEST_CASE("Celsius homes are detected and conditioned on the half-degC grid") {
  SynthConfig cfg;
  cfg.seed = 6;
  cfg.n_homes = 2;
  cfg.duration_days = 14;
  cfg.celsius_fraction = 1.0;
  auto r = generate(cfg);
  for (const auto& home : r.homes) {
    HomeResult h = process_home(home.meta, home.samples, default_cfg(), true);
    CHECK(h.unit == TempUnit::Celsius);
    for (const Sample& s : h.conditioned) {
      const double c = f_to_c(s.heat_setpoint) * 2.0;
      CHECK(std::fabs(c - std::round(c)) < 1e-6);
    }
  }
}

TEST_CASE("corpus pipeline recovers planted changes against the oracle") {
  SynthConfig cfg;
  cfg.seed = 21;
  cfg.n_homes = 8;
  cfg.duration_days = 30;
  auto r = generate(cfg);
  GroundTruth truth = r.truth;
  CorpusResult result = process_corpus(to_corpus(std::move(r)), default_cfg());

  DiscrepancyReport rep = oracle_compare(truth, views_of(result));
  CHECK(rep.true_sc > 500);
  CHECK(rep.sc_recall > 0.99);
  CHECK(rep.sc_precision > 0.99);
  CHECK(rep.cause_accuracy > 0.99);
  CHECK(rep.mean_abs_dod_error < 0.01);
  CHECK(rep.mean_abs_ttd_error < 0.01);
  CHECK(rep.occupancy_recall > 0.55);  // PIR TPR is only 0.33
  CHECK(rep.occupancy_recall < 1.0);
}

TEST_CASE("cohort selection feeds only matching homes into the aggregate") {
  SynthConfig cfg;
  cfg.seed = 31;
  cfg.n_homes = 6;
  cfg.duration_days = 10;
  cfg.single_occupant_fraction = 0.5;
  auto r = generate(cfg);

  PipelineConfig pc = default_cfg();
  pc.cohort.occupant_count = 1;
  CorpusResult result = process_corpus(to_corpus(std::move(r)), pc);
  CHECK(!result.cohort.empty());
  CHECK(result.cohort.size() < result.homes.size());
  CHECK(result.stats.home_count == result.cohort.size());

  std::uint64_t cohort_msc = 0;
  for (const HomeResult& h : result.homes) {
    const bool in = std::find(result.cohort.begin(), result.cohort.end(), h.meta.home_id) !=
                    result.cohort.end();
    if (in) {
      CHECK(h.meta.occupant_count == 1);
      cohort_msc += h.msc_count();
    }
  }
  CHECK(result.stats.msc_total == cohort_msc);

  // an unreachable msc floor empties the cohort
  pc.cohort.min_msc_count = 100000;
  SynthConfig cfg2 = cfg;
  auto r2 = generate(cfg2);
  CorpusResult none = process_corpus(to_corpus(std::move(r2)), pc);
  CHECK(none.cohort.empty());
  CHECK(none.stats.msc_total == 0);
}

TEST_CASE("results are independent of the thread count") {
  SynthConfig cfg;
  cfg.seed = 41;
  cfg.n_homes = 7;
  cfg.duration_days = 12;
  auto r1 = generate(cfg);
  auto r2 = generate(cfg);

  PipelineConfig one = default_cfg();
  one.threads = 1;
  PipelineConfig four = default_cfg();
  four.threads = 4;
  CorpusResult a = process_corpus(to_corpus(std::move(r1)), one);
  CorpusResult b = process_corpus(to_corpus(std::move(r2)), four);

  CHECK(Report{a.stats, 30, 0}.to_json() == Report{b.stats, 30, 0}.to_json());
  CHECK(a.diagnostics_json() == b.diagnostics_json());
  CHECK(a.cohort == b.cohort);
}

TEST_CASE("load_corpus round-trips a written corpus") {
  SynthConfig cfg;
  cfg.seed = 51;
  cfg.n_homes = 3;
  cfg.duration_days = 5;
  auto r = generate(cfg);
  const fs::path dir = fs::temp_directory_path() / "ttdkit_pipeline_test";
  fs::remove_all(dir);
  write_corpus(r, dir.string());

  std::vector<ParseReport> reports;
  Corpus corpus = load_corpus(dir.string(), {}, &reports);
  REQUIRE(corpus.size() == 3);
  REQUIRE(reports.size() == 3);
  for (const auto& rep : reports) CHECK(rep.rows_skipped == 0);

  // disk round trip changes nothing in the aggregate
  CorpusResult from_disk = process_corpus(std::move(corpus), default_cfg());
  CorpusResult in_memory = process_corpus(to_corpus(std::move(r)), default_cfg());
  CHECK(Report{from_disk.stats, 30, 0}.to_json() == Report{in_memory.stats, 30, 0}.to_json());
  fs::remove_all(dir);
}

TEST_CASE("fit_models produces per-mode primaries with a quantile ladder") {
  SynthConfig cfg;
  cfg.seed = 61;
  cfg.n_homes = 30;
  cfg.duration_days = 40;
  cfg.valve_fraction = 0;
  cfg.misestimate_fraction = 0;
  cfg.feedback_fraction = 1.0;
  auto r = generate(cfg);
  CorpusResult result = process_corpus(to_corpus(std::move(r)), default_cfg());

  FitOptions opts;
  opts.truncate = false;
  opts.min_bin_n = 30;
  FittedModels m = fit_models(result.stats, opts);
  REQUIRE(!m.primary.empty());
  for (const OverrideModel& primary : m.primary) {
    CHECK(primary.b_per_degF < 0);  // law decays with |DoD|
    const auto& levels =
        primary.mode == Mode::Heat ? m.heat_levels : m.cool_levels;
    CHECK(levels.size() >= 5);
    // quantile curves are ordered at a fixed dod
    double prev = 0;
    for (const OverrideModel& lv : levels) {
      const double t = evaluate(lv, 3.0).ttd_hours;
      CHECK(t >= prev * 0.999);
      prev = t;
    }
  }
}
