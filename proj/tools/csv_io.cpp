#include "csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mcvd::tool {

std::string format_value(double v) {
  // shortest representation that round-trips, locale-independent
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf, ptr);
}

void write_curves_csv(const std::string& path, const std::vector<SerCurve>& curves) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV: " + path);
  out << "series,parameter,x,ser,errors,trials,ci_low,ci_high\n";
  for (const auto& curve : curves) {
    for (const auto& pt : curve.points) {
      out << curve.series << ',' << curve.parameter << ',' << format_value(pt.x) << ','
          << format_value(pt.estimate.ser()) << ',' << pt.estimate.errors << ','
          << pt.estimate.trials << ',' << format_value(pt.ci.low) << ','
          << format_value(pt.ci.high) << '\n';
    }
  }
  if (!out) throw std::runtime_error("error writing CSV: " + path);
}

std::vector<CsvRow> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
  if (line.rfind("series,parameter,x,ser", 0) != 0)
    throw std::runtime_error("unexpected CSV header in " + path);
  std::vector<CsvRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 8 fields");
    CsvRow row;
    row.series = fields[0];
    row.parameter = fields[1];
    row.x = std::stod(fields[2]);
    row.ser = std::stod(fields[3]);
    row.errors = std::stoll(fields[4]);
    row.trials = std::stoll(fields[5]);
    row.ci_low = std::stod(fields[6]);
    row.ci_high = std::stod(fields[7]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mcvd::tool
