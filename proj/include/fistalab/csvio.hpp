#pragma once

#include <string>
#include <vector>

#include "fistalab/diagnostics.hpp"
#include "fistalab/solver.hpp"

namespace fistalab {

// All CSV output is comma-separated with a header row, LF line endings, and
// floats printed with 17 significant digits so values round-trip exactly.
// Missing cells (a quantity not defined at that index) are left empty.

// Columns: k,t,gap,vel,x0..x{d-1},y0..y{d-1}. One row per recorded iterate
// index; y columns are filled on rows whose index has a recorded ravine point.
void write_trace_csv(const std::string& path, const SolverTrace& trace);

// Columns: k,t,s,gap,vel,W,E,h[,R,D][,sum_tgap,sum_tvel2], one row per k.
void write_diagnostics_csv(const std::string& path, const LyapunovSeries& series,
                           const TwoPointResult* two_point,
                           const SummabilityReport* summability);

// Raw CSV reader for round-trip checks: header names plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace fistalab
