#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ttdkit/condition.hpp"
#include "ttdkit/types.hpp"

namespace ttdkit {

// A detected change of the active-mode setpoint between consecutive samples.
struct SetpointChange {
  std::string home_id;
  std::size_t index = 0;  // sample index where the new value first appears
  Minute time = 0;
  Mode mode = Mode::Heat;
  double prev_setpoint = 0.0;  // degF
  double new_setpoint = 0.0;   // degF
  bool manual = false;
  EventKind cause_event = EventKind::None;  // the sample's event tag
  bool deaveraged = false;
  // Filled by attribute_prior_event: cause of the immediately preceding SC.
  bool has_prior = false;
  bool prior_manual = false;
  EventKind prior_event = EventKind::None;
};

struct ChangeDiagnostics {
  std::size_t skipped_no_runtime = 0;   // mode unresolvable within +/-12 h
  std::size_t skipped_simultaneous = 0; // both columns moved, not both active
};

// One setpoint change per sample where the active-mode setpoint differs from
// the previous sample. A changed column counts as active when its equipment
// ran within +/-12 h of the change. Cause is Manual iff the sample is tagged
// as a manual hold (a setpoint that moves under a hold is also manual).
std::vector<SetpointChange> detect_changes(std::span<const Sample> samples,
                                           const std::string& home_id,
                                           const std::vector<char>& heat_corrected = {},
                                           const std::vector<char>& cool_corrected = {},
                                           ChangeDiagnostics* diag = nullptr);

// Annotates each change with the cause of the immediately preceding change;
// the first change of a home carries no prior.
void attribute_prior_event(std::vector<SetpointChange>& changes);

enum class EnergyImpact { Intensive, Saving };

// Raising the setpoint while heating or lowering it while cooling spends
// energy; the opposite saves it.
EnergyImpact classify_energy_impact(Mode mode, double dod);

struct MscFeature {
  std::string home_id;
  SetpointChange sc;                    // cause = Manual
  std::optional<double> ttd_minutes;    // time since the previous SC
  double dod = 0.0;                     // signed degF, new - prev
  bool continuously_occupied = false;
  bool within_2h = false;
  Mode season_mode = Mode::Heat;
  EnergyImpact energy_impact = EnergyImpact::Intensive;
  int tod_minutes = 0;                  // minutes since local midnight
  bool weekend = false;
  std::optional<double> duration_to_next_sc_minutes;

  // Membership in the dynamics analysis set.
  bool in_dynamics_set() const {
    return ttd_minutes.has_value() && continuously_occupied && within_2h;
  }
};

// Computes TTD/DoD features for every Manual change. TTD is present when a
// prior SC exists; continuous occupancy requires the [prev SC, MSC] sample
// span to lie within one segment; the dynamics set additionally requires
// TTD < 120 min.
std::vector<MscFeature> compute_ttd_dod(const std::vector<SetpointChange>& changes,
                                        const std::vector<OccupancySegment>& segments);

enum class MentalModelClass { ValveTrait, FeedbackMisestimate, Feedback };
const char* to_string(MentalModelClass c);

struct MentalModelResult {
  // Episode counts indexed by MentalModelClass.
  std::array<std::size_t, 3> episode_counts{};
  std::optional<MentalModelClass> home_class;  // absent when no episodes
  std::size_t total_episodes() const {
    return episode_counts[0] + episode_counts[1] + episode_counts[2];
  }
};

// Groups a home's manual changes into episodes (chains where consecutive
// manual changes are at most `window_minutes` apart) and classifies each by
// follow-up count: >=2 valve-trait, exactly 1 feedback-misestimate, 0
// feedback. The home's class is the modal episode class; ties break toward
// valve-trait, then misestimate.
MentalModelResult classify_mental_model(const std::vector<SetpointChange>& changes,
                                        int window_minutes = 60);

// MSC feature table, the interchange format between the pipeline and the
// stats/model stages. Columns are documented in the README.
void write_msc_csv(std::ostream& out, const std::vector<MscFeature>& features);
std::vector<MscFeature> read_msc_csv(std::istream& in);

}  // namespace ttdkit
