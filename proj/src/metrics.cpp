#include "aero_ftc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace aero_ftc {

std::vector<StepSegment> segment_steps(std::span<const double> t, std::span<const double> r,
                                       const MetricOptions& opts) {
  if (t.size() != r.size()) throw MetricError("segment_steps: time and reference lengths differ");
  std::vector<std::size_t> transitions;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i] != r[i - 1]) transitions.push_back(i);
  }
  std::vector<StepSegment> out;
  for (std::size_t j = 0; j < transitions.size(); ++j) {
    StepSegment seg;
    seg.begin = transitions[j];
    seg.end = j + 1 < transitions.size() ? transitions[j + 1] : r.size();
    seg.r_before = r[seg.begin - 1];
    seg.r_after = r[seg.begin];
    if (j + 1 == transitions.size() && t[seg.end - 1] - t[seg.begin] < opts.min_segment_duration) break;
    out.push_back(seg);
  }
  return out;
}

SegmentResponse slice(std::span<const double> t, std::span<const double> y, const StepSegment& seg) {
  return {t.subspan(seg.begin, seg.length()), y.subspan(seg.begin, seg.length()), seg.r_before, seg.r_after};
}

std::size_t steady_state_start(std::size_t n, double fraction) {
  const auto len = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  return n - std::clamp<std::size_t>(len, 1, n);
}

namespace {

double step_magnitude(const SegmentResponse& resp) {
  const double mag = resp.r_after - resp.r_before;
  if (mag == 0.0) throw MetricError("step magnitude is zero");
  if (resp.y.empty() || resp.t.size() != resp.y.size()) throw MetricError("empty or inconsistent segment");
  return mag;
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::optional<double> first_crossing(const SegmentResponse& resp, double mag, double level) {
  auto normalized = [&](std::size_t i) { return (resp.y[i] - resp.r_before) / mag; };
  for (std::size_t i = 0; i < resp.y.size(); ++i) {
    const double z = normalized(i);
    if (z >= level) {
      if (i == 0) return resp.t[0];
      const double z0 = normalized(i - 1);
      const double frac = (level - z0) / (z - z0);
      return resp.t[i - 1] + frac * (resp.t[i] - resp.t[i - 1]);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> rise_time(const SegmentResponse& resp, double low, double high) {
  const double mag = step_magnitude(resp);
  const auto t_low = first_crossing(resp, mag, low);
  const auto t_high = first_crossing(resp, mag, high);
  if (!t_low || !t_high) return std::nullopt;
  return *t_high - *t_low;
}

double overshoot(const SegmentResponse& resp, double steady_fraction) {
  const double mag = step_magnitude(resp);
  const std::size_t ss = steady_state_start(resp.y.size(), steady_fraction);
  const double settled = (mean(resp.y.subspan(ss)) - resp.r_before) / mag;
  double peak = -std::numeric_limits<double>::infinity();
  for (double y : resp.y) peak = std::max(peak, (y - resp.r_before) / mag);
  return std::max(0.0, peak - settled) * 100.0;
}

double steady_state_error(const SegmentResponse& resp, double steady_fraction) {
  const double mag = step_magnitude(resp);
  const std::size_t ss = steady_state_start(resp.y.size(), steady_fraction);
  return std::abs(mean(resp.y.subspan(ss)) - resp.r_after) / std::abs(mag) * 100.0;
}

double steady_state_sd(std::span<const double> window) {
  if (window.size() < 2) throw MetricError("standard deviation needs at least two samples");
  const double m = mean(window);
  double acc = 0.0;
  for (double v : window) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(window.size()));
}

double natural_frequency(std::span<const double> t, std::span<const double> y, double equilibrium) {
  if (t.size() != y.size()) throw MetricError("natural_frequency: time and signal lengths differ");
  // Exact zeros are skipped; a crossing is interpolated between consecutive
  // nonzero samples of opposite sign.
  std::vector<double> crossings;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double b = y[i] - equilibrium;
    if (b == 0.0) continue;
    if (prev) {
      const double a = y[*prev] - equilibrium;
      if (a * b < 0.0) crossings.push_back(t[*prev] + a / (a - b) * (t[i] - t[*prev]));
    }
    prev = i;
  }
  if (crossings.size() < 3) {
    throw MetricError("natural_frequency: response is not oscillatory (" + std::to_string(crossings.size()) +
                      " zero crossings, need 3)");
  }
  const double half_period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  return std::numbers::pi / half_period;
}

const char* axis_name(Axis axis) { return axis == Axis::kPitch ? "pitch" : "yaw"; }

namespace {

AxisSummary summarize(Axis axis, const std::vector<StepMetrics>& steps, const std::vector<VibrationMetrics>& vib) {
  AxisSummary s;
  s.axis = axis;
  double rise_sum = 0.0;
  std::size_t rise_n = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].axis != axis) continue;
    ++s.segments;
    if (steps[i].rise_time) {
      rise_sum += *steps[i].rise_time;
      ++rise_n;
    }
    s.overshoot += steps[i].overshoot;
    s.sse += steps[i].sse;
    s.vibration.angle_sd_deg += vib[i].angle_sd_deg;
    s.vibration.voltage_sd += vib[i].voltage_sd;
  }
  if (s.segments > 0) {
    const auto n = static_cast<double>(s.segments);
    s.overshoot /= n;
    s.sse /= n;
    s.vibration.angle_sd_deg /= n;
    s.vibration.voltage_sd /= n;
  }
  if (rise_n > 0) s.rise_time = rise_sum / static_cast<double>(rise_n);
  return s;
}

std::string fmt_opt(const std::optional<double>& v, int precision) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *v;
  return os.str();
}

}  // namespace

MetricsReport compute_metrics(const SimTrace& trace, const MetricOptions& opts, double t_from) {
  MetricsReport report;
  const std::vector<double> t = trace.time();
  for (Axis axis : {Axis::kPitch, Axis::kYaw}) {
    const int idx = static_cast<int>(axis);
    const std::vector<double> r = trace.reference(idx);
    std::vector<double> y = trace.angle(idx);
    const std::vector<double> u = trace.command(idx);
    int n = 0;
    for (const StepSegment& seg : segment_steps(t, r, opts)) {
      if (t[seg.begin] < t_from) continue;
      const SegmentResponse resp = slice(t, y, seg);
      StepMetrics m;
      m.axis = axis;
      m.segment = n++;
      m.t_start = t[seg.begin];
      m.r_before_deg = rad_to_deg(seg.r_before);
      m.r_after_deg = rad_to_deg(seg.r_after);
      m.rise_time = rise_time(resp, opts.rise_low, opts.rise_high);
      if (!m.rise_time) m.note = "response never reached " + std::to_string(opts.rise_high * 100.0) + "% of step";
      m.overshoot = overshoot(resp, opts.steady_state_fraction);
      m.sse = steady_state_error(resp, opts.steady_state_fraction);

      VibrationMetrics v;
      const std::size_t ss = seg.begin + steady_state_start(seg.length(), opts.steady_state_fraction);
      const std::span<const double> ys(y.data() + ss, seg.end - ss);
      const std::span<const double> us(u.data() + ss, seg.end - ss);
      if (ys.size() >= 2) {
        v.angle_sd_deg = rad_to_deg(steady_state_sd(ys));
        v.voltage_sd = steady_state_sd(us);
      }
      report.steps.push_back(std::move(m));
      report.step_vibration.push_back(v);
    }
  }
  report.pitch = summarize(Axis::kPitch, report.steps, report.step_vibration);
  report.yaw = summarize(Axis::kYaw, report.steps, report.step_vibration);
  return report;
}

std::string metrics_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "axis,segment,t_start,r_before_deg,r_after_deg,rise_time_s,overshoot_pct,sse_pct,angle_sd_deg,voltage_sd_v\n";
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const StepMetrics& m = report.steps[i];
    const VibrationMetrics& v = report.step_vibration[i];
    os << axis_name(m.axis) << ',' << m.segment << ',' << m.t_start << ',' << m.r_before_deg << ','
       << m.r_after_deg << ',';
    if (m.rise_time) os << *m.rise_time;
    os << ',' << m.overshoot << ',' << m.sse << ',' << v.angle_sd_deg << ',' << v.voltage_sd << '\n';
  }
  return os.str();
}

std::string metrics_table(const MetricsReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "axis" << std::right << std::setw(10) << "segments" << std::setw(12) << "SSE (%)"
     << std::setw(16) << "Rise time (s)" << std::setw(16) << "Overshoot (%)" << std::setw(16) << "angle SD (deg)"
     << std::setw(16) << "voltage SD (V)" << '\n';
  for (const AxisSummary* s : {&report.pitch, &report.yaw}) {
    os << std::left << std::setw(8) << axis_name(s->axis) << std::right << std::setw(10) << s->segments
       << std::fixed << std::setprecision(3) << std::setw(12) << s->sse << std::setw(16) << fmt_opt(s->rise_time, 3)
       << std::setw(16) << s->overshoot << std::setw(16) << s->vibration.angle_sd_deg << std::setw(16)
       << s->vibration.voltage_sd << '\n';
    os.unsetf(std::ios::fixed);
  }
  return os.str();
}

CompareReport compare_traces(const SimTrace& baseline, const SimTrace& candidate, const MetricOptions& opts) {
  if (baseline.size() != candidate.size()) {
    throw MetricError("traces have different lengths (" + std::to_string(baseline.size()) + " vs " +
                      std::to_string(candidate.size()) + " samples)");
  }
  if (std::abs(baseline.T_s - candidate.T_s) > 1e-12) throw MetricError("traces have different sample times");
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (std::abs(baseline.samples[i].t - candidate.samples[i].t) > 1e-9) {
      throw MetricError("traces are not on the same time grid (sample " + std::to_string(i) + ")");
    }
  }
  CompareReport rep;
  rep.baseline = compute_metrics(baseline, opts);
  rep.candidate = compute_metrics(candidate, opts);
  auto delta = [](const AxisSummary& b, const AxisSummary& c) {
    AxisDelta d;
    d.axis = b.axis;
    if (b.rise_time && c.rise_time) d.rise_time = *c.rise_time - *b.rise_time;
    d.overshoot = c.overshoot - b.overshoot;
    d.sse = c.sse - b.sse;
    d.angle_sd_deg = c.vibration.angle_sd_deg - b.vibration.angle_sd_deg;
    d.voltage_sd = c.vibration.voltage_sd - b.vibration.voltage_sd;
    return d;
  };
  rep.pitch = delta(rep.baseline.pitch, rep.candidate.pitch);
  rep.yaw = delta(rep.baseline.yaw, rep.candidate.yaw);
  return rep;
}

std::string compare_table(const CompareReport& rep) {
  std::ostringstream os;
  os << "baseline\n" << metrics_table(rep.baseline) << "\ncandidate\n" << metrics_table(rep.candidate);
  os << "\ndelta (candidate - baseline)\n";
  os << std::left << std::setw(8) << "axis" << std::right << std::setw(12) << "dSSE (%)" << std::setw(16)
     << "dRise time (s)" << std::setw(16) << "dOvershoot (%)" << std::setw(16) << "dangle SD" << std::setw(16)
     << "dvoltage SD" << '\n';
  for (const AxisDelta* d : {&rep.pitch, &rep.yaw}) {
    os << std::left << std::setw(8) << axis_name(d->axis) << std::right << std::fixed << std::setprecision(3)
       << std::setw(12) << d->sse << std::setw(16) << fmt_opt(d->rise_time, 3) << std::setw(16) << d->overshoot
       << std::setw(16) << d->angle_sd_deg << std::setw(16) << d->voltage_sd << '\n';
    os.unsetf(std::ios::fixed);
  }
  return os.str();
}

}  // namespace aero_ftc
