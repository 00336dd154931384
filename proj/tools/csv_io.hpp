#pragma once

#include <string>
#include <vector>

#include "mcvd/ser.hpp"

namespace mcvd::tool {

/// One curve per series; shared column layout:
/// series,parameter,x,ser,errors,trials,ci_low,ci_high
void write_curves_csv(const std::string& path, const std::vector<SerCurve>& curves);

struct CsvRow {
  std::string series;
  std::string parameter;
  double x = 0.0;
  double ser = 0.0;
  long long errors = 0;
  long long trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

std::vector<CsvRow> read_curves_csv(const std::string& path);

/// Deterministic shortest round-trip formatting for doubles.
std::string format_value(double v);

}  // namespace mcvd::tool
