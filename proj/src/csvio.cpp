#include "fistalab/csvio.hpp"

#include <fstream>

#include "fistalab/errors.hpp"
#include "fistalab/textio.hpp"

namespace fistalab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_trace_csv(const std::string& path, const SolverTrace& trace) {
  std::ofstream out = open_out(path);
  const std::size_t d = trace.xs.empty() ? 0 : trace.xs.front().size();
  out << "k,t,gap,vel";
  for (std::size_t j = 0; j < d; ++j) out << ",x" << j;
  for (std::size_t j = 0; j < d; ++j) out << ",y" << j;
  out << '\n';

  std::size_t yi = 0;
  for (std::size_t i = 0; i < trace.ks.size(); ++i) {
    const long k = trace.ks[i];
    out << k;
    out << ',';
    if (k >= 1 && k <= trace.steps + 1) out << fmt17(trace.t(k));
    out << ',';
    if (trace.has_gaps) out << fmt17(trace.gaps[static_cast<std::size_t>(k)]);
    out << ',';
    if (k >= 1) out << fmt17(trace.vels[static_cast<std::size_t>(k - 1)]);
    for (std::size_t j = 0; j < d; ++j) out << ',' << fmt17(trace.xs[i][j]);
    const bool has_y = yi < trace.y_ks.size() && trace.y_ks[yi] == k;
    for (std::size_t j = 0; j < d; ++j) {
      out << ',';
      if (has_y) out << fmt17(trace.ys[yi][j]);
    }
    if (has_y) ++yi;
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

void write_diagnostics_csv(const std::string& path, const LyapunovSeries& series,
                           const TwoPointResult* two_point,
                           const SummabilityReport* summability) {
  std::ofstream out = open_out(path);
  out << "k,t,s,gap,vel,W,E,h";
  if (two_point) out << ",R,D";
  if (summability) out << ",sum_tgap,sum_tvel2";
  out << '\n';
  for (std::size_t i = 0; i < series.records.size(); ++i) {
    const auto& r = series.records[i];
    out << r.k << ',' << fmt17(r.t) << ',' << fmt17(r.s) << ',' << fmt17(r.gap) << ','
        << fmt17(r.vel) << ',' << fmt17(r.W) << ',' << fmt17(r.E) << ',' << fmt17(r.h);
    if (two_point) {
      out << ',';
      if (i < two_point->records.size()) {
        out << fmt17(two_point->records[i].R) << ',' << fmt17(two_point->records[i].D);
      } else {
        out << ',';
      }
    }
    if (summability) {
      out << ',';
      if (i < summability->partial_gap_sum.size()) out << fmt17(summability->partial_gap_sum[i]);
      out << ',';
      if (i < summability->partial_vel_sum.size()) out << fmt17(summability->partial_vel_sum[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv: " + path);
  table.header = split_on(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split_on(line, ','));
    if (table.rows.back().size() != table.header.size()) {
      throw IoError("ragged csv row in " + path);
    }
  }
  return table;
}

}  // namespace fistalab
