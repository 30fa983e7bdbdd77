#pragma once

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aero_ftc/sim.hpp"

namespace aero_ftc {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conventions for the time-response metrics. None of these are fixed by
/// the rig documentation, so they are all adjustable.
struct MetricOptions {
  double steady_state_fraction = 0.25;  // final part of each segment used as steady state
  double rise_low = 0.1;                // rise time measured from 10 % ...
  double rise_high = 0.9;               // ... to 90 % of the step
  double min_segment_duration = 1.0;    // s; shorter trailing segments are dropped
};

/// Samples [begin, end) following a reference transition at `begin`.
struct StepSegment {
  std::size_t begin = 0;
  std::size_t end = 0;
  double r_before = 0.0;
  double r_after = 0.0;

  double magnitude() const { return r_after - r_before; }
  std::size_t length() const { return end - begin; }
};

/// One segment per reference transition. Every segment runs to the next
/// transition except the last one, which runs to the end of the record and
/// is kept only if it lasts at least min_segment_duration.
std::vector<StepSegment> segment_steps(std::span<const double> t, std::span<const double> r,
                                       const MetricOptions& opts = {});

/// Response to a single step: time stamps and output over one segment.
struct SegmentResponse {
  std::span<const double> t;
  std::span<const double> y;
  double r_before = 0.0;
  double r_after = 0.0;
};

SegmentResponse slice(std::span<const double> t, std::span<const double> y, const StepSegment& seg);

/// Index of the first steady-state sample within a segment of length n.
std::size_t steady_state_start(std::size_t n, double fraction);

/// Time between the first crossings of low and high fractions of the step,
/// crossing instants linearly interpolated. nullopt if the high level is
/// never reached.
std::optional<double> rise_time(const SegmentResponse& resp, double low = 0.1, double high = 0.9);

/// Peak excursion beyond the settled value, percent of |step|. The settled
/// value is the mean over the steady-state window.
double overshoot(const SegmentResponse& resp, double steady_fraction = 0.25);

/// |mean(y over steady window) - r_after| / |step| * 100.
double steady_state_error(const SegmentResponse& resp, double steady_fraction = 0.25);

/// Population standard deviation; needs at least two samples.
double steady_state_sd(std::span<const double> window);

/// Damped frequency pi / (mean spacing of zero crossings about
/// `equilibrium`), crossings linearly interpolated. Needs at least three
/// crossings; throws MetricError otherwise.
double natural_frequency(std::span<const double> t, std::span<const double> y, double equilibrium = 0.0);

enum class Axis { kPitch = 0, kYaw = 1 };
const char* axis_name(Axis axis);

struct StepMetrics {
  Axis axis = Axis::kPitch;
  int segment = 0;
  double t_start = 0.0;
  double r_before_deg = 0.0;
  double r_after_deg = 0.0;
  std::optional<double> rise_time;  // s
  double overshoot = 0.0;           // %
  double sse = 0.0;                 // %
  std::string note;                 // set when rise time is missing
};

struct VibrationMetrics {
  double angle_sd_deg = 0.0;
  double voltage_sd = 0.0;  // V, motor driving the axis (pitch: motor0, yaw: motor1)
};

struct AxisSummary {
  Axis axis = Axis::kPitch;
  std::size_t segments = 0;
  std::optional<double> rise_time;  // mean over segments that reached 90 %
  double overshoot = 0.0;           // mean, %
  double sse = 0.0;                 // mean, %
  VibrationMetrics vibration;       // mean of per-segment steady-state SDs
};

struct MetricsReport {
  std::vector<StepMetrics> steps;
  std::vector<VibrationMetrics> step_vibration;  // parallel to steps
  AxisSummary pitch;
  AxisSummary yaw;

  const AxisSummary& axis(Axis a) const { return a == Axis::kPitch ? pitch : yaw; }
};

/// Metrics for every step segment whose transition happens at or after
/// t_from (use it to restrict the analysis to the post-fault part of a run).
MetricsReport compute_metrics(const SimTrace& trace, const MetricOptions& opts = {},
                              double t_from = -std::numeric_limits<double>::infinity());

std::string metrics_csv(const MetricsReport& report);
std::string metrics_table(const MetricsReport& report);

/// Candidate minus baseline for each summary figure.
struct AxisDelta {
  Axis axis = Axis::kPitch;
  std::optional<double> rise_time;
  double overshoot = 0.0;
  double sse = 0.0;
  double angle_sd_deg = 0.0;
  double voltage_sd = 0.0;
};

struct CompareReport {
  MetricsReport baseline;
  MetricsReport candidate;
  AxisDelta pitch;
  AxisDelta yaw;
};

/// Throws MetricError when the two traces are not on the same time grid.
CompareReport compare_traces(const SimTrace& baseline, const SimTrace& candidate, const MetricOptions& opts = {});
std::string compare_table(const CompareReport& report);

}  // namespace aero_ftc
