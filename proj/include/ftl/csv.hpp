#pragma once

#include <cstdio>
#include <string>

namespace ftl {

// Shortest round-trippable decimal form; identical bytes on identical input,
// which the deterministic-output contract of the CSV exports relies on.
inline std::string csv_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf);
}

}  // namespace ftl
