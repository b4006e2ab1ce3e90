#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttdkit/types.hpp"

namespace ttdkit {

// Column schema is configuration, not code. Defaults follow the common
// connected-thermostat export header names; override to match other exports.
struct ColumnMap {
  std::string datetime = "DateTime";
  std::string heat_setpoint = "T_stp_heat";
  std::string cool_setpoint = "T_stp_cool";
  std::string indoor_temp = "T_ctrl";
  std::string outdoor_temp = "T_out";  // optional column
  std::string event = "Event";
  std::string motion = "Motion";
  std::string heat_runtime = "auxHeat1";
  std::string cool_runtime = "compCool1";
};

struct ParseReport {
  std::size_t rows_kept = 0;
  std::size_t rows_skipped = 0;  // malformed + off_grid + duplicates + out_of_order
  std::size_t malformed = 0;
  std::size_t off_grid = 0;
  std::size_t duplicates = 0;
  std::size_t out_of_order = 0;
  std::string to_json() const;
};

struct ParsedHome {
  HomeMeta meta;
  std::vector<Sample> samples;
  ParseReport report;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses one per-home telemetry CSV. Rows come back in timestamp order;
// duplicate timestamps keep the first occurrence. Throws ParseError on an
// unreadable header or when more than half the data rows are malformed
// (which signals a wrong schema, not bad data).
ParsedHome parse_home(std::istream& in, const std::string& home_id,
                      const ColumnMap& columns = {});

// Re-serializes samples in the same wire format parse_home reads.
void write_samples_csv(std::ostream& out, const std::vector<Sample>& samples,
                       const ColumnMap& columns = {});

// Metadata CSV: home_id,occupant_count,floor_area,country (empty = absent).
std::vector<HomeMeta> load_metadata(std::istream& in);
void write_metadata(std::ostream& out, const std::vector<HomeMeta>& metas);

// Homes satisfying all active filters, sorted by id.
std::vector<std::string> select_cohort(const std::vector<HomeMeta>& metas,
                                       const std::map<std::string, std::size_t>& msc_counts,
                                       const CohortCriteria& criteria);

}  // namespace ttdkit
