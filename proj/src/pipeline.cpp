#include "ttdkit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "json.hpp"

namespace ttdkit {

using nlohmann::json;

std::vector<double> setpoint_unit_deltas(std::span<const Sample> samples) {
  std::vector<double> out;
  auto column = [&](double Sample::* field) {
    std::vector<double> stable;
    const std::size_t n = samples.size();
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && std::fabs(samples[j + 1].*field - samples[i].*field) < 1e-9) ++j;
      if (j > i) {
        const double v = samples[i].*field;
        if (stable.empty() || std::fabs(stable.back() - v) > 1e-9) stable.push_back(v);
      }
      i = j + 1;
    }
    for (std::size_t k = 1; k < stable.size(); ++k) out.push_back(stable[k] - stable[k - 1]);
  };
  column(&Sample::heat_setpoint);
  column(&Sample::cool_setpoint);
  return out;
}

namespace {

// De-averages one setpoint column in the user's native unit and writes the
// corrected values (back in degF) into the samples.
std::vector<DeaverageRecord> condition_column(std::vector<Sample>& samples,
                                              double Sample::* field, TempUnit unit,
                                              std::vector<char>& corrected_mask) {
  std::vector<double> series;
  series.reserve(samples.size());
  for (const Sample& s : samples)
    series.push_back(unit == TempUnit::Celsius ? f_to_c(s.*field) : s.*field);

  DeaverageResult res = deaverage_setpoints(series, unit_increment(unit));
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i].*field = unit == TempUnit::Celsius ? c_to_f(res.corrected[i]) : res.corrected[i];
  for (const DeaverageRecord& r : res.records) corrected_mask[r.index] = 1;
  return std::move(res.records);
}

}  // namespace

HomeResult process_home(const HomeMeta& meta, std::vector<Sample> samples,
                        const PipelineConfig& cfg, bool keep_conditioned) {
  HomeResult r;
  r.meta = meta;
  if (!samples.empty()) {
    r.series_start = samples.front().time;
    r.observed_days = static_cast<double>(samples.back().time - samples.front().time + 5) / 1440.0;
  }

  const std::vector<double> deltas = setpoint_unit_deltas(samples);
  r.unit = detect_unit(deltas);

  std::vector<char> motion(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) motion[i] = samples[i].motion;
  r.occupancy_filtered = fill_occupancy(motion, cfg.occupancy);
  r.segments = segment_occupancy(r.occupancy_filtered, motion);

  if (r.unit == TempUnit::Unknown) {
    // No reliable increment: leave the series as-is and extract nothing.
    if (keep_conditioned) r.conditioned = std::move(samples);
    return r;
  }

  std::vector<char> heat_mask(samples.size()), cool_mask(samples.size());
  r.heat_records = condition_column(samples, &Sample::heat_setpoint, r.unit, heat_mask);
  r.cool_records = condition_column(samples, &Sample::cool_setpoint, r.unit, cool_mask);

  r.changes = detect_changes(samples, meta.home_id, heat_mask, cool_mask, &r.change_diag);
  attribute_prior_event(r.changes);
  r.features = compute_ttd_dod(r.changes, r.segments);
  r.mental = classify_mental_model(r.changes);

  if (keep_conditioned) r.conditioned = std::move(samples);
  return r;
}

CorpusResult process_corpus(Corpus corpus, const PipelineConfig& cfg, bool keep_conditioned) {
  CorpusResult out;
  out.homes.resize(corpus.size());

  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || corpus.size() <= 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      out.homes[i] =
          process_home(corpus[i].first, std::move(corpus[i].second), cfg, keep_conditioned);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next.fetch_add(1); i < corpus.size(); i = next.fetch_add(1))
            out.homes[i] =
                process_home(corpus[i].first, std::move(corpus[i].second), cfg, keep_conditioned);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<HomeMeta> metas;
  std::map<std::string, std::size_t> msc_counts;
  for (const HomeResult& h : out.homes) {
    metas.push_back(h.meta);
    msc_counts[h.meta.home_id] = h.msc_count();
    if (h.unit == TempUnit::Unknown) ++out.unknown_unit_homes;
  }

  out.cohort = select_cohort(metas, msc_counts, cfg.cohort);
  {
    std::set<std::string> unknown;
    for (const HomeResult& h : out.homes)
      if (h.unit == TempUnit::Unknown) unknown.insert(h.meta.home_id);
    std::erase_if(out.cohort, [&](const std::string& id) { return unknown.count(id) > 0; });
  }

  // Aggregation runs serially in input order, so the result is independent of
  // the thread count above.
  const std::set<std::string> cohort_set(out.cohort.begin(), out.cohort.end());
  for (const HomeResult& h : out.homes) {
    if (!cohort_set.count(h.meta.home_id)) continue;
    out.stats.add_home(h.observed_days);
    for (const MscFeature& f : h.features) out.stats.accumulate(f);
    for (std::size_t c = 0; c < 3; ++c) out.episode_totals[c] += h.mental.episode_counts[c];
    if (h.mental.home_class)
      ++out.home_class_totals[static_cast<std::size_t>(*h.mental.home_class)];
  }
  return out;
}

std::string CorpusResult::diagnostics_json() const {
  const std::set<std::string> cohort_set(cohort.begin(), cohort.end());
  json homes_j = json::array();
  for (const HomeResult& h : homes) {
    json j{{"home_id", h.meta.home_id},
           {"unit", h.unit == TempUnit::Fahrenheit   ? "F"
                    : h.unit == TempUnit::Celsius ? "C"
                                                  : "unknown"},
           {"observed_days", h.observed_days},
           {"changes", h.changes.size()},
           {"msc_count", h.msc_count()},
           {"deaveraged_heat", h.heat_records.size()},
           {"deaveraged_cool", h.cool_records.size()},
           {"skipped_no_runtime", h.change_diag.skipped_no_runtime},
           {"skipped_simultaneous", h.change_diag.skipped_simultaneous},
           {"in_cohort", cohort_set.count(h.meta.home_id) > 0},
           {"parse", json::parse(h.parse_report.to_json())}};
    if (h.mental.home_class) j["mental_model"] = to_string(*h.mental.home_class);
    homes_j.push_back(std::move(j));
  }
  json j{{"homes", homes_j},
         {"cohort_size", cohort.size()},
         {"unknown_unit_homes", unknown_unit_homes},
         {"episode_totals",
          {{"valve", episode_totals[0]},
           {"misestimate", episode_totals[1]},
           {"feedback", episode_totals[2]}}},
         {"home_class_totals",
          {{"valve", home_class_totals[0]},
           {"misestimate", home_class_totals[1]},
           {"feedback", home_class_totals[2]}}}};
  return j.dump(2);
}

Corpus load_corpus(const std::string& dir, const ColumnMap& columns,
                   std::vector<ParseReport>* reports) {
  namespace fs = std::filesystem;
  std::ifstream meta_in(fs::path(dir) / "metadata.csv");
  if (!meta_in) throw ParseError("cannot open " + dir + "/metadata.csv");
  std::vector<HomeMeta> metas = load_metadata(meta_in);
  std::sort(metas.begin(), metas.end(),
            [](const HomeMeta& a, const HomeMeta& b) { return a.home_id < b.home_id; });

  Corpus corpus;
  if (reports) reports->clear();
  for (const HomeMeta& meta : metas) {
    const fs::path path = fs::path(dir) / ("home_" + meta.home_id + ".csv");
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    ParsedHome parsed = parse_home(in, meta.home_id, columns);
    parsed.meta = meta;  // telemetry files carry no occupancy/country info
    if (reports) reports->push_back(parsed.report);
    corpus.emplace_back(std::move(parsed.meta), std::move(parsed.samples));
  }
  return corpus;
}

FittedModels fit_models(const StatsBundle& stats, const FitOptions& options) {
  FittedModels out;
  for (Mode mode : {Mode::Heat, Mode::Cool}) {
    const QuantileSurface& surface =
        mode == Mode::Heat ? stats.surface_heat : stats.surface_cool;
    try {
      out.primary.push_back(fit(surface, mode, options));
    } catch (const FitError&) {
      continue;  // too little data on this side; the other mode may still fit
    }
    auto& levels = mode == Mode::Heat ? out.heat_levels : out.cool_levels;
    for (int dec = 1; dec <= 9; ++dec) {
      FitOptions o = options;
      o.quantile = dec / 10.0;
      try {
        levels.push_back(fit(surface, mode, o));
      } catch (const FitError&) {
      }
    }
  }
  return out;
}

}  // namespace ttdkit
