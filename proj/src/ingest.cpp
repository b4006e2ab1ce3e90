#include "ttdkit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "ttdkit/csv.hpp"

namespace ttdkit {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  std::string s(buf);
  std::size_t dot = s.find('.');
  if (dot != std::string::npos) {
    std::size_t last = s.find_last_not_of('0');
    if (last == dot) last -= 1;
    s.erase(last + 1);
  }
  if (s == "-0") s = "0";
  return s;
}

namespace {

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "1" || s == "true" || s == "True") { out = true; return true; }
  if (s == "0" || s == "false" || s == "False") { out = false; return true; }
  return false;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string ParseReport::to_json() const {
  std::ostringstream os;
  os << "{\"rows_kept\":" << rows_kept << ",\"rows_skipped\":" << rows_skipped
     << ",\"malformed\":" << malformed << ",\"off_grid\":" << off_grid
     << ",\"duplicates\":" << duplicates << ",\"out_of_order\":" << out_of_order << "}";
  return os.str();
}

ParsedHome parse_home(std::istream& in, const std::string& home_id, const ColumnMap& columns) {
  ParsedHome result;
  result.meta.home_id = home_id;

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: no header row");
  line = strip_cr(line);

  const auto header = split_csv(line);
  auto find_col = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  };

  const int c_time = find_col(columns.datetime);
  const int c_hsp = find_col(columns.heat_setpoint);
  const int c_csp = find_col(columns.cool_setpoint);
  const int c_in = find_col(columns.indoor_temp);
  const int c_out = find_col(columns.outdoor_temp);  // optional
  const int c_event = find_col(columns.event);
  const int c_motion = find_col(columns.motion);
  const int c_hrt = find_col(columns.heat_runtime);
  const int c_crt = find_col(columns.cool_runtime);
  if (c_time < 0 || c_hsp < 0 || c_csp < 0 || c_in < 0 || c_event < 0 || c_motion < 0 ||
      c_hrt < 0 || c_crt < 0) {
    throw ParseError("header missing required columns (check the column map)");
  }
  const int max_required =
      std::max({c_time, c_hsp, c_csp, c_in, c_event, c_motion, c_hrt, c_crt});

  ParseReport& rep = result.report;
  std::size_t physical_rows = 0;

  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    ++physical_rows;

    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) <= max_required) {
      ++rep.malformed;
      continue;
    }

    Sample s;
    auto ts = parse_datetime(fields[c_time]);
    bool ok = ts.has_value();
    if (ok) s.time = *ts;
    ok = ok && parse_double(fields[c_hsp], s.heat_setpoint);
    ok = ok && parse_double(fields[c_csp], s.cool_setpoint);
    ok = ok && parse_double(fields[c_in], s.indoor_temp);
    if (ok && c_out >= 0 && !fields[c_out].empty()) {
      double v;
      if (parse_double(fields[c_out], v)) s.outdoor_temp = v;
      else ok = false;
    }
    if (ok) {
      auto ev = event_from_string(fields[c_event], &s.hold);
      if (ev) s.event = *ev;
      else ok = false;
    }
    ok = ok && parse_bool(fields[c_motion], s.motion);
    ok = ok && parse_int(fields[c_hrt], s.heat_runtime);
    ok = ok && parse_int(fields[c_crt], s.cool_runtime);
    ok = ok && s.heat_runtime >= 0 && s.heat_runtime <= 300;
    ok = ok && s.cool_runtime >= 0 && s.cool_runtime <= 300;
    if (!ok) {
      ++rep.malformed;
      continue;
    }
    if (!on_grid(s.time)) {
      ++rep.off_grid;
      continue;
    }
    if (!result.samples.empty()) {
      if (s.time == result.samples.back().time) {
        ++rep.duplicates;  // keep the first occurrence
        continue;
      }
      if (s.time < result.samples.back().time) {
        ++rep.out_of_order;
        continue;
      }
    }
    result.samples.push_back(s);
    ++rep.rows_kept;
  }

  rep.rows_skipped = rep.malformed + rep.off_grid + rep.duplicates + rep.out_of_order;
  if (physical_rows > 0 && rep.malformed * 2 > physical_rows) {
    throw ParseError("more than half the rows are malformed; wrong schema for " + home_id);
  }
  return result;
}

void write_samples_csv(std::ostream& out, const std::vector<Sample>& samples,
                       const ColumnMap& columns) {
  out << columns.datetime << ',' << columns.heat_setpoint << ',' << columns.cool_setpoint << ','
      << columns.indoor_temp << ',' << columns.outdoor_temp << ',' << columns.event << ','
      << columns.motion << ',' << columns.heat_runtime << ',' << columns.cool_runtime << '\n';
  for (const Sample& s : samples) {
    out << format_datetime(s.time) << ',' << fmt_num(s.heat_setpoint) << ','
        << fmt_num(s.cool_setpoint) << ',' << fmt_num(s.indoor_temp) << ',';
    if (s.outdoor_temp) out << fmt_num(*s.outdoor_temp);
    out << ',' << event_to_token(s.event, s.hold) << ',' << (s.motion ? '1' : '0') << ','
        << s.heat_runtime << ',' << s.cool_runtime << '\n';
  }
}

std::vector<HomeMeta> load_metadata(std::istream& in) {
  std::vector<HomeMeta> metas;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty metadata file");
  line = strip_cr(line);
  const auto header = split_csv(line);
  int c_id = -1, c_occ = -1, c_area = -1, c_country = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "home_id") c_id = static_cast<int>(i);
    else if (header[i] == "occupant_count") c_occ = static_cast<int>(i);
    else if (header[i] == "floor_area") c_area = static_cast<int>(i);
    else if (header[i] == "country") c_country = static_cast<int>(i);
  }
  if (c_id < 0) throw ParseError("metadata header missing home_id");
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) <= c_id) continue;
    HomeMeta m;
    m.home_id = std::string(fields[c_id]);
    if (c_occ >= 0 && c_occ < static_cast<int>(fields.size()) && !fields[c_occ].empty()) {
      int v;
      if (parse_int(fields[c_occ], v) && v > 0) m.occupant_count = v;
    }
    if (c_area >= 0 && c_area < static_cast<int>(fields.size()) && !fields[c_area].empty()) {
      double v;
      if (parse_double(fields[c_area], v)) m.floor_area = v;
    }
    if (c_country >= 0 && c_country < static_cast<int>(fields.size()) &&
        !fields[c_country].empty()) {
      m.country = std::string(fields[c_country]);
    }
    metas.push_back(std::move(m));
  }
  return metas;
}

void write_metadata(std::ostream& out, const std::vector<HomeMeta>& metas) {
  out << "home_id,occupant_count,floor_area,country\n";
  for (const HomeMeta& m : metas) {
    out << m.home_id << ',';
    if (m.occupant_count) out << *m.occupant_count;
    out << ',';
    if (m.floor_area) out << fmt_num(*m.floor_area);
    out << ',';
    if (m.country) out << *m.country;
    out << '\n';
  }
}

std::vector<std::string> select_cohort(const std::vector<HomeMeta>& metas,
                                       const std::map<std::string, std::size_t>& msc_counts,
                                       const CohortCriteria& criteria) {
  std::vector<std::string> out;
  for (const HomeMeta& m : metas) {
    if (criteria.occupant_count &&
        (!m.occupant_count || *m.occupant_count != *criteria.occupant_count))
      continue;
    if (criteria.countries &&
        (!m.country || criteria.countries->find(*m.country) == criteria.countries->end()))
      continue;
    auto it = msc_counts.find(m.home_id);
    const std::size_t n = it == msc_counts.end() ? 0 : it->second;
    if (n < criteria.min_msc_count) continue;
    out.push_back(m.home_id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ttdkit
