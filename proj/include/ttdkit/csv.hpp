#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ttdkit {

// Splits one CSV line on commas. The telemetry wire format carries no quoted
// fields, so no quote handling is needed.
inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Fixed-precision number formatting: up to four decimals, trailing zeros
// stripped. Used everywhere a float is written so repeated runs are
// byte-identical.
std::string fmt_num(double v);

}  // namespace ttdkit
