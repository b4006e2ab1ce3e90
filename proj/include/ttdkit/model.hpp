#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttdkit/stats.hpp"
#include "ttdkit/types.hpp"

namespace ttdkit {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  double quantile = 0.5;
  bool truncate = true;        // drop the immediate-notice peak before fitting
  double truncate_min = 10.0;  // minutes
  std::size_t min_bin_n = 30;  // bins below this are low-confidence, excluded
};

// TTD-quantile law: ttd_hours = a * exp(b * |dod|), fitted per mode on the
// energy-intensive side.
struct OverrideModel {
  Mode mode = Mode::Heat;
  double quantile = 0.5;
  double a_hours = 0.0;    // pre-exponential; > 0
  double b_per_degF = 0.0; // exponent rate
  double dod_min = 1.0;    // fitted |DoD| range
  double dod_max = 10.0;

  struct BinDiag {
    double dod_mag = 0.0;
    double ttd_q_hours = 0.0;
    std::size_t n = 0;
    double residual_log = 0.0;  // ln(observed) - ln(fitted)
  };
  std::vector<BinDiag> diagnostics;

  std::string to_json() const;
  static OverrideModel from_json(const std::string& text);
};

struct FitPoint {
  double dod_mag = 0.0;
  double ttd_q_hours = 0.0;
  double weight = 1.0;
};

// Weighted least squares of ln(ttd) = ln(a) + b * |dod| over bin centers.
OverrideModel fit_points(std::span<const FitPoint> points, Mode mode, double quantile);

// Extracts (|dod|, quantile-TTD, n) points from the surface's
// energy-intensive side (positive DoD for Heat, negative for Cool) and fits.
// Throws FitError with fewer than two usable bins or non-positive quantiles.
OverrideModel fit(const QuantileSurface& surface, Mode mode, const FitOptions& opts = {});

struct Evaluation {
  double ttd_hours = 0.0;
  bool extrapolated = false;  // |dod| outside the fitted range
  bool off_side = false;      // sign is the mode's energy-saving direction
};

Evaluation evaluate(const OverrideModel& model, double dod_signed);

struct OverridePrediction {
  double dod = 0.0;
  double horizon_minutes = 0.0;
  double fraction_overriding = 0.0;  // within the dynamics set
  std::string source;                // "empirical-surface" | "fitted-model"
  std::string to_json() const;
};

// Empirical mode: CDF of the retained TTD samples in the bin for `dod`.
OverridePrediction predict_override_fraction(const QuantileSurface& surface, double dod,
                                             double horizon_minutes);

// Model mode: interpolates the quantile level whose fitted TTD crosses the
// horizon, across models fitted at increasing quantile levels.
OverridePrediction predict_override_fraction(std::span<const OverrideModel> quantile_models,
                                             double dod, double horizon_minutes);

// JSON container used by the CLI: the primary model plus the quantile ladder.
std::string models_to_json(const OverrideModel& primary,
                           const std::vector<OverrideModel>& levels);
void models_from_json(const std::string& text, OverrideModel& primary,
                      std::vector<OverrideModel>& levels);

}  // namespace ttdkit
