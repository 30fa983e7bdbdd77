#include "aero_ftc/trace_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace aero_ftc {

const std::vector<std::string>& trace_csv_columns() {
  static const std::vector<std::string> cols = {
      "t",       "r_pitch_deg", "r_yaw_deg", "pitch_deg",   "yaw_deg",     "pitch_rate", "yaw_rate",
      "u0_lqr",  "u1_lqr",      "u0_cmd",    "u1_cmd",      "u0_eff",      "u1_eff",     "gamma0_true",
      "gamma1_true", "gamma0_est", "gamma1_est", "sat0",     "sat1"};
  return cols;
}

TraceTable to_table(const SimTrace& trace) {
  TraceTable table;
  table.rows.reserve(trace.size());
  for (const TraceSample& s : trace.samples) {
    table.rows.push_back({s.t,
                          rad_to_deg(s.r_pitch),
                          rad_to_deg(s.r_yaw),
                          rad_to_deg(s.x(0)),
                          rad_to_deg(s.x(1)),
                          rad_to_deg(s.x(2)),
                          rad_to_deg(s.x(3)),
                          s.u_lqr(0),
                          s.u_lqr(1),
                          s.u_cmd(0),
                          s.u_cmd(1),
                          s.u_eff(0),
                          s.u_eff(1),
                          s.gamma_true(0),
                          s.gamma_true(1),
                          s.gamma_raw(0),
                          s.gamma_raw(1),
                          s.saturated[0] ? 1.0 : 0.0,
                          s.saturated[1] ? 1.0 : 0.0});
  }
  return table;
}

SimTrace from_table(const TraceTable& table) {
  SimTrace trace;
  if (table.rows.size() >= 2) trace.T_s = table.rows[1][0] - table.rows[0][0];
  trace.samples.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    TraceSample s;
    s.t = r[0];
    s.r_pitch = deg_to_rad(r[1]);
    s.r_yaw = deg_to_rad(r[2]);
    s.x = StateVector(deg_to_rad(r[3]), deg_to_rad(r[4]), deg_to_rad(r[5]), deg_to_rad(r[6]));
    s.u_lqr = InputVector(r[7], r[8]);
    s.u_cmd = InputVector(r[9], r[10]);
    s.u_eff = InputVector(r[11], r[12]);
    s.gamma_true = InputVector(r[13], r[14]);
    s.gamma_raw = InputVector(r[15], r[16]);
    s.gamma_clamped = clamp_fault(s.gamma_raw);
    s.saturated = {r[17] != 0.0, r[18] != 0.0};
    trace.samples.push_back(s);
  }
  return trace;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_trace_csv(std::ostream& os, const TraceTable& table) {
  const auto& cols = trace_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) { write_trace_csv(os, to_table(trace)); }

std::string trace_csv(const SimTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

TraceTable read_trace_csv(std::istream& is) {
  const auto& cols = trace_csv_columns();
  std::string line;
  if (!std::getline(is, line)) throw TraceFormatError("trace CSV is empty");
  {
    std::string expected;
    for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) throw TraceFormatError("line 1: unexpected trace CSV header");
  }
  TraceTable table;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(cols.size());
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{}) {
        throw TraceFormatError("line " + std::to_string(lineno) + ": bad number in column " +
                               std::to_string(row.size() + 1));
      }
      row.push_back(v);
      p = res.ptr;
      if (p == end) break;
      if (*p != ',') throw TraceFormatError("line " + std::to_string(lineno) + ": expected ','");
      ++p;
    }
    if (row.size() != cols.size()) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) +
                             " columns, got " + std::to_string(row.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TraceTable read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot open trace file '" + path + "'");
  return read_trace_csv(in);
}

}  // namespace aero_ftc
