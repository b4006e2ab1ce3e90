#include "ttdkit/model.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace ttdkit {

using nlohmann::json;

namespace {

json model_to_json_obj(const OverrideModel& m) {
  json diag = json::array();
  for (const auto& d : m.diagnostics) {
    diag.push_back({{"dod", d.dod_mag},
                    {"ttd_q_hours", d.ttd_q_hours},
                    {"n", d.n},
                    {"residual_log", d.residual_log}});
  }
  return json{{"mode", to_string(m.mode)},
              {"quantile", m.quantile},
              {"a_hours", m.a_hours},
              {"b_per_degF", m.b_per_degF},
              {"fitted_range", {m.dod_min, m.dod_max}},
              {"diagnostics", diag}};
}

OverrideModel model_from_json_obj(const json& j) {
  OverrideModel m;
  auto mode = mode_from_string(j.at("mode").get<std::string>());
  if (!mode) throw FitError("bad mode in model JSON");
  m.mode = *mode;
  m.quantile = j.at("quantile").get<double>();
  m.a_hours = j.at("a_hours").get<double>();
  m.b_per_degF = j.at("b_per_degF").get<double>();
  m.dod_min = j.at("fitted_range").at(0).get<double>();
  m.dod_max = j.at("fitted_range").at(1).get<double>();
  for (const auto& d : j.at("diagnostics")) {
    m.diagnostics.push_back({d.at("dod").get<double>(), d.at("ttd_q_hours").get<double>(),
                             d.at("n").get<std::size_t>(), d.at("residual_log").get<double>()});
  }
  return m;
}

}  // namespace

std::string OverrideModel::to_json() const { return model_to_json_obj(*this).dump(2); }

OverrideModel OverrideModel::from_json(const std::string& text) {
  return model_from_json_obj(json::parse(text));
}

OverrideModel fit_points(std::span<const FitPoint> points, Mode mode, double quantile) {
  if (points.size() < 2) throw FitError("need at least two bins to fit");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (const FitPoint& p : points) {
    if (p.ttd_q_hours <= 0) throw FitError("non-positive quantile TTD in fit input");
    const double y = std::log(p.ttd_q_hours);
    sw += p.weight;
    swx += p.weight * p.dod_mag;
    swy += p.weight * y;
    swxx += p.weight * p.dod_mag * p.dod_mag;
    swxy += p.weight * p.dod_mag * y;
  }
  const double denom = swxx - swx * swx / sw;
  if (denom <= 0) throw FitError("degenerate fit: all bins at the same |DoD|");
  const double b = (swxy - swx * swy / sw) / denom;
  const double ln_a = (swy - b * swx) / sw;

  OverrideModel m;
  m.mode = mode;
  m.quantile = quantile;
  m.a_hours = std::exp(ln_a);
  m.b_per_degF = b;
  double lo = points.front().dod_mag, hi = points.front().dod_mag;
  for (const FitPoint& p : points) {
    lo = std::min(lo, p.dod_mag);
    hi = std::max(hi, p.dod_mag);
    m.diagnostics.push_back(
        {p.dod_mag, p.ttd_q_hours, static_cast<std::size_t>(p.weight),
         std::log(p.ttd_q_hours) - (ln_a + b * p.dod_mag)});
  }
  m.dod_min = lo;
  m.dod_max = hi;
  return m;
}

OverrideModel fit(const QuantileSurface& surface, Mode mode, const FitOptions& opts) {
  std::vector<FitPoint> points;
  for (int k = 1; k <= QuantileSurface::kMaxMagnitude; ++k) {
    const int center = mode == Mode::Heat ? k : -k;  // energy-intensive side
    const double floor_min = opts.truncate ? opts.truncate_min : -1.0;
    const auto samples = surface.samples_above(center, floor_min);
    if (samples.size() < opts.min_bin_n) continue;
    const double q = interpolated_quantile(samples, opts.quantile);
    if (q <= 0) throw FitError("non-positive quantile TTD at |DoD| = " + std::to_string(k));
    points.push_back({static_cast<double>(k), q / 60.0, static_cast<double>(samples.size())});
  }
  if (points.size() < 2)
    throw FitError(std::string("fewer than two usable DoD bins for mode ") + to_string(mode));
  return fit_points(points, mode, opts.quantile);
}

Evaluation evaluate(const OverrideModel& model, double dod_signed) {
  const double mag = std::fabs(dod_signed);
  Evaluation e;
  e.ttd_hours = model.a_hours * std::exp(model.b_per_degF * mag);
  e.extrapolated = mag < model.dod_min || mag > model.dod_max;
  const bool intensive = (model.mode == Mode::Heat && dod_signed > 0) ||
                         (model.mode == Mode::Cool && dod_signed < 0);
  e.off_side = dod_signed != 0 && !intensive;
  return e;
}

std::string OverridePrediction::to_json() const {
  json j{{"dod", dod},
         {"horizon_minutes", horizon_minutes},
         {"fraction_overriding", fraction_overriding},
         {"source", source}};
  return j.dump(2);
}

OverridePrediction predict_override_fraction(const QuantileSurface& surface, double dod,
                                             double horizon_minutes) {
  const int center = QuantileSurface::bin_center(dod);
  if (surface.n(center) == 0)
    throw FitError("empty DoD bin " + std::to_string(center) + " degF");
  OverridePrediction p;
  p.dod = dod;
  p.horizon_minutes = horizon_minutes;
  p.fraction_overriding = surface.cdf(center, horizon_minutes);
  p.source = "empirical-surface";
  return p;
}

OverridePrediction predict_override_fraction(std::span<const OverrideModel> quantile_models,
                                             double dod, double horizon_minutes) {
  if (quantile_models.empty()) throw FitError("no fitted quantile models");
  // (ttd at this dod, level), sorted by ttd; level is non-decreasing in ttd.
  std::vector<std::pair<double, double>> curve;
  for (const OverrideModel& m : quantile_models)
    curve.emplace_back(evaluate(m, dod).ttd_hours * 60.0, m.quantile);
  std::sort(curve.begin(), curve.end());

  OverridePrediction p;
  p.dod = dod;
  p.horizon_minutes = horizon_minutes;
  p.source = "fitted-model";
  if (horizon_minutes < curve.front().first) {
    p.fraction_overriding = 0.0;
    return p;
  }
  if (horizon_minutes >= curve.back().first) {
    p.fraction_overriding = curve.back().second;
    return p;
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (horizon_minutes < curve[i].first) {
      const auto& [t0, q0] = curve[i - 1];
      const auto& [t1, q1] = curve[i];
      const double frac = (horizon_minutes - t0) / (t1 - t0);
      p.fraction_overriding = q0 + frac * (q1 - q0);
      return p;
    }
  }
  p.fraction_overriding = curve.back().second;
  return p;
}

std::string models_to_json(const OverrideModel& primary,
                           const std::vector<OverrideModel>& levels) {
  json j = model_to_json_obj(primary);
  json lv = json::array();
  for (const OverrideModel& m : levels) lv.push_back(model_to_json_obj(m));
  j["levels"] = lv;
  return j.dump(2);
}

void models_from_json(const std::string& text, OverrideModel& primary,
                      std::vector<OverrideModel>& levels) {
  const json j = json::parse(text);
  primary = model_from_json_obj(j);
  levels.clear();
  if (j.contains("levels"))
    for (const auto& m : j.at("levels")) levels.push_back(model_from_json_obj(m));
}

}  // namespace ttdkit
