#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aero_ftc/sim.hpp"

namespace aero_ftc {

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column names of the trace CSV, in order. Angles and references are in
/// degrees, rates in deg/s, voltages in V. gamma*_est is the raw filter
/// estimate (not clamped).
const std::vector<std::string>& trace_csv_columns();

/// A trace in CSV units, one row per sample.
struct TraceTable {
  std::vector<std::vector<double>> rows;
};

TraceTable to_table(const SimTrace& trace);
SimTrace from_table(const TraceTable& table);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

void write_trace_csv(std::ostream& os, const TraceTable& table);
void write_trace_csv(std::ostream& os, const SimTrace& trace);
std::string trace_csv(const SimTrace& trace);

/// Throws TraceFormatError (with line number) on a wrong header, wrong
/// column count or unparsable number.
TraceTable read_trace_csv(std::istream& is);
TraceTable read_trace_csv_file(const std::string& path);

}  // namespace aero_ftc
