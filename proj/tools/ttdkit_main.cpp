// ttdkit command-line driver: synthetic corpus generation plus the analysis
// stages (condition, extract, stats, fit, predict) and an `all` shortcut.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ttdkit/csv.hpp"
#include "ttdkit/pipeline.hpp"
#include "ttdkit/synth.hpp"

namespace fs = std::filesystem;
using namespace ttdkit;

namespace {

struct Options {
  std::string input;
  std::string output;
  int window_minutes = 30;
  std::string cohort = "all";  // "all" | "single"
  std::size_t min_msc = 10;
  int threads = 1;
  std::uint64_t seed = 0;

  double quantile = 0.5;
  bool no_truncate = false;
  double truncate_min = 10.0;
  std::size_t min_bin_n = 30;

  std::string model_file;
  std::string mode = "heat";
  double dod = 0.0;
  double horizon = 60.0;
  std::string format = "json";

  SynthConfig synth;
  std::string dt_model = "clean";
};

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig cfg;
  cfg.occupancy.window_minutes = o.window_minutes;
  cfg.cohort.min_msc_count = o.min_msc;
  if (o.cohort == "single") cfg.cohort.occupant_count = 1;
  cfg.fit.quantile = o.quantile;
  cfg.fit.truncate = !o.no_truncate;
  cfg.fit.truncate_min = o.truncate_min;
  cfg.fit.min_bin_n = o.min_bin_n;
  cfg.threads = o.threads;
  cfg.seed = o.seed;
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

CorpusResult run_corpus(const Options& o, bool keep_conditioned = false) {
  std::vector<ParseReport> reports;
  Corpus corpus = load_corpus(o.input, ColumnMap{}, &reports);
  CorpusResult result = process_corpus(std::move(corpus), pipeline_config(o), keep_conditioned);
  for (std::size_t i = 0; i < result.homes.size() && i < reports.size(); ++i)
    result.homes[i].parse_report = reports[i];
  return result;
}

std::vector<MscFeature> cohort_features(const CorpusResult& r) {
  const std::set<std::string> cohort(r.cohort.begin(), r.cohort.end());
  std::vector<MscFeature> out;
  for (const HomeResult& h : r.homes)
    if (cohort.count(h.meta.home_id))
      out.insert(out.end(), h.features.begin(), h.features.end());
  return out;
}

// Rebuilds the accumulators from an MSC feature CSV (already cohort-filtered
// by the stage that wrote it). Observation days are not recoverable here.
StatsBundle stats_from_msc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  StatsBundle s;
  std::set<std::string> ids;
  for (const MscFeature& f : read_msc_csv(in)) {
    s.accumulate(f);
    ids.insert(f.home_id);
  }
  s.home_count = ids.size();
  return s;
}

StatsBundle stats_for_fit(const Options& o) {
  if (fs::is_directory(o.input)) return run_corpus(o).stats;
  return stats_from_msc(o.input);
}

void write_models(const FittedModels& m, const fs::path& dir) {
  fs::create_directories(dir);
  for (const OverrideModel& primary : m.primary) {
    const bool heat = primary.mode == Mode::Heat;
    const auto& levels = heat ? m.heat_levels : m.cool_levels;
    write_file(dir / (heat ? "model_heat.json" : "model_cool.json"),
               models_to_json(primary, levels));
    std::cout << to_string(primary.mode) << ": ttd_hours = " << primary.a_hours
              << " * exp(" << primary.b_per_degF << " * |dod|)  [q" << primary.quantile
              << ", |dod| " << primary.dod_min << ".." << primary.dod_max << "]\n";
  }
  if (m.primary.empty()) throw FitError("no mode had enough data to fit");
}

void write_extract_artifacts(const CorpusResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "msc.csv", std::ios::binary);
    write_msc_csv(out, cohort_features(result));
  }
  write_file(dir / "diagnostics.json", result.diagnostics_json());
}

void write_run_config(const Options& o, const fs::path& dir) {
  nlohmann::json j{{"seed", o.seed},
                   {"window_minutes", o.window_minutes},
                   {"cohort", o.cohort},
                   {"min_msc", o.min_msc},
                   {"quantile", o.quantile},
                   {"truncate", !o.no_truncate},
                   {"truncate_min", o.truncate_min},
                   {"min_bin_n", o.min_bin_n}};
  write_file(dir / "run.json", j.dump(2));
}

int cmd_synth(const Options& o) {
  SynthConfig cfg = o.synth;
  cfg.seed = o.seed;
  if (o.dt_model == "clean")
    cfg.dt_model = DtModel::Clean;
  else if (o.dt_model == "fixed-half")
    cfg.dt_model = DtModel::FixedHalf;
  else
    cfg.dt_model = DtModel::Uniform;
  SynthResult result = generate(cfg);
  write_corpus(result, o.output);
  std::size_t changes = 0, mscs = 0;
  for (const TrueHome& h : result.truth.homes) {
    changes += h.changes.size();
    mscs += h.mscs.size();
  }
  std::cout << "wrote " << result.homes.size() << " homes, " << changes << " changes ("
            << mscs << " manual) to " << o.output << "\n";
  return 0;
}

int cmd_condition(const Options& o) {
  CorpusResult result = run_corpus(o, /*keep_conditioned=*/true);
  fs::create_directories(o.output);
  std::vector<HomeMeta> metas;
  nlohmann::json homes_j = nlohmann::json::array();
  for (const HomeResult& h : result.homes) {
    metas.push_back(h.meta);
    std::ofstream out(fs::path(o.output) / ("home_" + h.meta.home_id + ".csv"),
                      std::ios::binary);
    write_samples_csv(out, h.conditioned);
    homes_j.push_back(
        {{"home_id", h.meta.home_id},
         {"unit", h.unit == TempUnit::Fahrenheit   ? "F"
                  : h.unit == TempUnit::Celsius ? "C"
                                                : "unknown"},
         {"heat", nlohmann::json::parse(deaverage_records_json(h.heat_records))},
         {"cool", nlohmann::json::parse(deaverage_records_json(h.cool_records))}});
  }
  {
    std::ofstream out(fs::path(o.output) / "metadata.csv", std::ios::binary);
    write_metadata(out, metas);
  }
  write_file(fs::path(o.output) / "conditioning.json",
             nlohmann::json{{"homes", homes_j}}.dump(2));
  return 0;
}

int cmd_extract(const Options& o) {
  write_extract_artifacts(run_corpus(o), o.output);
  return 0;
}

int cmd_stats(const Options& o) {
  CorpusResult result = run_corpus(o);
  fs::create_directories(o.output);
  Report report{result.stats, o.window_minutes, o.seed};
  write_file(fs::path(o.output) / "report.json", report.to_json());
  report.write_figure_csvs((fs::path(o.output) / "figures").string());
  return 0;
}

int cmd_fit(const Options& o) {
  const StatsBundle stats = stats_for_fit(o);
  PipelineConfig cfg = pipeline_config(o);
  write_models(fit_models(stats, cfg.fit), o.output);
  return 0;
}

int cmd_predict(const Options& o) {
  if (o.model_file.empty() && o.input.empty())
    throw std::runtime_error("predict needs --model or --input");
  OverridePrediction p;
  if (!o.model_file.empty()) {
    std::ifstream in(o.model_file);
    if (!in) throw std::runtime_error("cannot open " + o.model_file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    OverrideModel primary;
    std::vector<OverrideModel> levels;
    models_from_json(text, primary, levels);
    if (levels.empty()) levels.push_back(primary);
    p = predict_override_fraction(levels, o.dod, o.horizon);
  } else {
    const StatsBundle stats = stats_for_fit(o);
    const auto mode = mode_from_string(o.mode);
    if (!mode) throw std::runtime_error("bad --mode: " + o.mode);
    const QuantileSurface& surface =
        *mode == Mode::Heat ? stats.surface_heat : stats.surface_cool;
    p = predict_override_fraction(surface, o.dod, o.horizon);
  }
  std::string text;
  if (o.format == "csv") {
    text = "dod,horizon_minutes,fraction_overriding,source\n" + fmt_num(p.dod) + "," +
           fmt_num(p.horizon_minutes) + "," + fmt_num(p.fraction_overriding) + "," + p.source;
  } else {
    text = p.to_json();
  }
  if (o.output.empty())
    std::cout << text << "\n";
  else
    write_file(o.output, text);
  return 0;
}

int cmd_all(const Options& o) {
  CorpusResult result = run_corpus(o);
  const fs::path dir = o.output;
  write_extract_artifacts(result, dir);
  Report report{result.stats, o.window_minutes, o.seed};
  write_file(dir / "report.json", report.to_json());
  report.write_figure_csvs((dir / "figures").string());
  PipelineConfig cfg = pipeline_config(o);
  write_models(fit_models(result.stats, cfg.fit), dir);
  write_run_config(o, dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermostat-override telemetry toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI config file");
  Options o;

  auto add_pipeline_opts = [&](CLI::App* c, bool needs_input = true) {
    if (needs_input)
      c->add_option("-i,--input", o.input, "Corpus directory (or MSC CSV where supported)")
          ->required();
    c->add_option("-w,--window", o.window_minutes, "Occupancy gap-fill window W, minutes");
    c->add_option("--cohort", o.cohort, "Cohort filter: all | single")
        ->check(CLI::IsMember({"all", "single"}));
    c->add_option("--min-msc", o.min_msc, "Minimum manual changes per home");
    c->add_option("-j,--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto add_fit_opts = [&](CLI::App* c) {
    c->add_option("-q,--quantile", o.quantile, "Quantile level to fit")
        ->check(CLI::Range(0.01, 0.99));
    c->add_flag("--no-truncate", o.no_truncate, "Keep the immediate-notice peak");
    c->add_option("--truncate-min", o.truncate_min, "Lower TTD truncation, minutes");
    c->add_option("--min-bin-n", o.min_bin_n, "Minimum samples per DoD bin");
  };

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("-o,--output", o.output, "Output directory")->required();
  synth->add_option("--seed", o.seed, "RNG seed")->default_val(1);
  synth->add_option("--homes", o.synth.n_homes, "Number of homes");
  synth->add_option("--days", o.synth.duration_days, "Days of telemetry per home");
  synth->add_option("--celsius-fraction", o.synth.celsius_fraction, "Fraction of degC homes");
  synth->add_option("--single-occupant-fraction", o.synth.single_occupant_fraction,
                    "Fraction of single-occupant homes");
  synth->add_option("--heat-fraction", o.synth.heat_mode_fraction, "Fraction of heating homes");
  synth->add_option("--override-prob", o.synth.override_prob,
                    "Probability a setback gets overridden");
  synth->add_option("--law-a", o.synth.law_a_hours, "Planted law: a, hours");
  synth->add_option("--law-b", o.synth.law_b_per_degF, "Planted law: b, 1/degF");
  synth->add_option("--sigma", o.synth.ttd_sigma_log, "Lognormal TTD spread");
  synth->add_option("--magnitudes", o.synth.dod_magnitudes_degF, "Setback magnitudes, degF")
      ->delimiter(',');
  synth->add_option("--dt-model", o.dt_model, "Switch-time model")
      ->check(CLI::IsMember({"clean", "fixed-half", "uniform"}));
  synth->add_option("--tpr", o.synth.true_positive_rate, "PIR true-positive rate");
  synth->add_option("--fpr", o.synth.false_positive_rate, "PIR false-positive rate");
  synth->add_option("--valve-fraction", o.synth.valve_fraction, "Valve-trait episode share");
  synth->add_option("--misestimate-fraction", o.synth.misestimate_fraction,
                    "Feedback-misestimate episode share");
  synth->add_option("--feedback-fraction", o.synth.feedback_fraction, "Feedback episode share");

  CLI::App* condition = app.add_subcommand("condition", "Unit detection + de-averaging");
  add_pipeline_opts(condition);
  condition->add_option("-o,--output", o.output, "Output directory")->required();

  CLI::App* extract = app.add_subcommand("extract", "Detect changes, compute TTD/DoD features");
  add_pipeline_opts(extract);
  extract->add_option("-o,--output", o.output, "Output directory")->required();

  CLI::App* stats = app.add_subcommand("stats", "Population statistics + figure data");
  add_pipeline_opts(stats);
  stats->add_option("-o,--output", o.output, "Output directory")->required();
  stats->add_option("--seed", o.seed, "Seed recorded in the report");

  CLI::App* fit = app.add_subcommand("fit", "Fit the TTD-quantile law");
  add_pipeline_opts(fit);
  fit->add_option("-o,--output", o.output, "Output directory")->required();
  add_fit_opts(fit);

  CLI::App* predict = app.add_subcommand("predict", "Override fraction at a DoD and horizon");
  predict->add_option("-i,--input", o.input, "Corpus directory or MSC CSV (empirical mode)");
  predict->add_option("-m,--model", o.model_file, "Fitted model JSON (model mode)");
  predict->add_option("--mode", o.mode, "heat | cool (empirical mode)")
      ->check(CLI::IsMember({"heat", "cool"}));
  predict->add_option("--dod", o.dod, "Signed depth of discomfort, degF")->required();
  predict->add_option("--horizon", o.horizon, "Horizon, minutes")->required();
  predict->add_option("--format", o.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  predict->add_option("-o,--output", o.output, "Output file (default stdout)");
  predict->add_option("-w,--window", o.window_minutes, "Occupancy window (empirical mode)");
  predict->add_option("--cohort", o.cohort, "all | single (empirical mode)")
      ->check(CLI::IsMember({"all", "single"}));
  predict->add_option("--min-msc", o.min_msc, "Minimum manual changes per home");
  predict->add_option("-j,--threads", o.threads, "Worker threads");

  CLI::App* all = app.add_subcommand("all", "extract + stats + fit in one pass");
  add_pipeline_opts(all);
  all->add_option("-o,--output", o.output, "Output directory")->required();
  add_fit_opts(all);
  all->add_option("--seed", o.seed, "Seed recorded in the artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(o);
    if (condition->parsed()) return cmd_condition(o);
    if (extract->parsed()) return cmd_extract(o);
    if (stats->parsed()) return cmd_stats(o);
    if (fit->parsed()) return cmd_fit(o);
    if (predict->parsed()) return cmd_predict(o);
    if (all->parsed()) return cmd_all(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
