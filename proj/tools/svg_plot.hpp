#pragma once

#include <string>
#include <vector>

#include "csv_io.hpp"

namespace mcvd::tool {

/// SER-vs-parameter plot: linear x, log10 y, one polyline per series.
/// Zero-SER points are clamped to the bottom decade and drawn hollow.
void write_ser_svg(const std::string& path, const std::vector<CsvRow>& rows,
                   const std::string& title);

}  // namespace mcvd::tool
