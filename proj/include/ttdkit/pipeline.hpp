#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ttdkit/condition.hpp"
#include "ttdkit/features.hpp"
#include "ttdkit/ingest.hpp"
#include "ttdkit/model.hpp"
#include "ttdkit/stats.hpp"

namespace ttdkit {

struct PipelineConfig {
  ColumnMap columns;
  OccupancyFilterConfig occupancy;  // W
  CohortCriteria cohort;
  FitOptions fit;
  int threads = 1;
  std::uint64_t seed = 0;  // recorded in output artifacts
};

// Everything the pipeline derives for one home. Pure per-home computation;
// corpus-level work (cohort selection, aggregation) happens afterwards.
struct HomeResult {
  HomeMeta meta;
  TempUnit unit = TempUnit::Unknown;
  ParseReport parse_report;
  Minute series_start = 0;
  double observed_days = 0;

  std::vector<Sample> conditioned;  // retained only on request
  std::vector<DeaverageRecord> heat_records, cool_records;
  std::vector<char> occupancy_filtered;
  std::vector<OccupancySegment> segments;
  std::vector<SetpointChange> changes;
  ChangeDiagnostics change_diag;
  std::vector<MscFeature> features;  // one per manual change
  MentalModelResult mental;

  std::size_t msc_count() const { return features.size(); }
};

// Nonzero setpoint deltas (degF, both columns) for unit detection. Only
// values stable for at least two consecutive samples participate, so the
// sampler's time-averaged transients (which sit between the true setpoints
// and would split one change into two off-grid deltas) are excluded.
std::vector<double> setpoint_unit_deltas(std::span<const Sample> samples);

HomeResult process_home(const HomeMeta& meta, std::vector<Sample> samples,
                        const PipelineConfig& cfg, bool keep_conditioned = false);

struct CorpusResult {
  std::vector<HomeResult> homes;    // input order
  std::vector<std::string> cohort;  // selected home ids, sorted
  StatsBundle stats;                // aggregated over the cohort
  std::array<std::size_t, 3> episode_totals{};    // by MentalModelClass
  std::array<std::size_t, 3> home_class_totals{};
  std::size_t unknown_unit_homes = 0;

  std::string diagnostics_json() const;
};

using Corpus = std::vector<std::pair<HomeMeta, std::vector<Sample>>>;

// Fans per-home work out to `cfg.threads` workers and aggregates via
// shard-and-merge; numerical results are independent of the thread count.
CorpusResult process_corpus(Corpus corpus, const PipelineConfig& cfg,
                            bool keep_conditioned = false);

// Reads metadata.csv plus home_<id>.csv files from a corpus directory.
Corpus load_corpus(const std::string& dir, const ColumnMap& columns,
                   std::vector<ParseReport>* reports = nullptr);

struct FittedModels {
  // Primary model at cfg.fit.quantile plus a ladder over levels 0.1..0.9,
  // per mode. A mode with too little data is simply absent.
  std::vector<OverrideModel> primary;
  std::vector<OverrideModel> heat_levels;
  std::vector<OverrideModel> cool_levels;
};

FittedModels fit_models(const StatsBundle& stats, const FitOptions& options);

}  // namespace ttdkit
