#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aero_ftc/accommodation.hpp"
#include "aero_ftc/estimator.hpp"
#include "aero_ftc/lqr.hpp"
#include "aero_ftc/model.hpp"

namespace aero_ftc {

/// Square wave +amplitude / -amplitude. The wave is positive on the first
/// half of each period counted from `phase`.
struct AxisReference {
  double amplitude_deg = 10.0;
  double period = 40.0;  // s
  double phase = 0.0;    // s
};

/// Reference angle in radians. Throws InvalidParameter if period <= 0.
double reference_square(double t, const AxisReference& axis);

/// Fault applied from the first sample at or after `time`.
struct FaultEvent {
  double time = 0.0;
  FaultVector gamma;
};

struct ScenarioConfig {
  std::string name = "scenario";

  ContinuousModel model = ContinuousModel::aero2();
  LqrWeights weights;
  CareOptions care;

  bool estimator_enabled = true;
  bool control_from_estimate = true;  // false: LQR acts on the raw measurement
  NoiseConfig noise;
  FaultEstimator::Prior prior;
  StateVector estimator_state_offset = StateVector::Zero();  // added to y(0) for x_hat(0)
  InputVector estimator_fault_guess = InputVector::Zero();

  AccommodationConfig accommodation;

  AxisReference pitch{10.0, 40.0, 0.0};
  AxisReference yaw{45.0, 40.0, 10.0};
  double pitch_limit_deg = 60.0;

  std::vector<FaultEvent> faults;

  double duration = 80.0;  // s
  double T_s = 0.002;      // s
  std::uint64_t seed = 0;
  StateVector measurement_noise_std = StateVector::Constant(1e-4);
  StateVector process_noise_std = StateVector::Zero();  // per-step additive, on the true state
  StateVector x0 = StateVector::Zero();
  double divergence_limit = 1e6;

  /// Throws InvalidParameter describing the first violated constraint.
  void validate() const;

  /// floor(duration / T_s) + 1
  std::size_t sample_count() const;
};

struct TraceSample {
  double t = 0.0;
  double r_pitch = 0.0;  // rad
  double r_yaw = 0.0;    // rad
  StateVector x = StateVector::Zero();
  InputVector u_lqr = InputVector::Zero();
  InputVector u_cmd = InputVector::Zero();  // sent to the actuators, after saturation
  InputVector u_eff = InputVector::Zero();  // realized by the faulty actuators
  InputVector gamma_true = InputVector::Zero();
  InputVector gamma_raw = InputVector::Zero();
  InputVector gamma_clamped = InputVector::Zero();
  std::array<bool, kInputs> saturated{false, false};
};

/// Uniformly sampled closed-loop record.
struct SimTrace {
  double T_s = 0.0;
  std::vector<TraceSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::vector<double> time() const;
  std::vector<double> reference(int axis) const;  // rad; axis 0 pitch, 1 yaw
  std::vector<double> angle(int axis) const;      // rad
  std::vector<double> command(int motor) const;   // u_cmd, V
  std::vector<double> fault_estimate(int motor) const;  // raw
};

/// Raised when ||x|| exceeds the divergence limit; keeps the trace up to and
/// including the offending sample.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, SimTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SimTrace& partial_trace() const noexcept { return partial_; }

 private:
  SimTrace partial_;
};

/// Classical fourth-order Runge-Kutta step with the input held constant.
template <typename Vector, typename Rhs>
Vector rk4_step(const Rhs& f, const Vector& x, double h) {
  const Vector k1 = f(x);
  const Vector k2 = f(Vector(x + 0.5 * h * k1));
  const Vector k3 = f(Vector(x + 0.5 * h * k2));
  const Vector k4 = f(Vector(x + h * k3));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

StateVector integrate_step(const ContinuousModel& m, const StateVector& x, const InputVector& u_eff, double T_s);

/// Per-step hook for tests and diagnostics; called after the sample is recorded.
struct StepView {
  std::size_t k;
  double t;
  const StateVector& x_true;
  const InputVector& gamma_true;
  const FaultEstimator* estimator;  // null when the estimator is disabled
};
using StepObserver = std::function<void(const StepView&)>;

/// Runs one scenario. Per sample: y = C x + v; estimator update with the
/// command applied over the previous interval; u_lqr = K (r - x_ctrl);
/// accommodation; saturation; fault injection; RK4 to the next sample.
/// Deterministic for a given config (including seed).
SimTrace run_scenario(const ScenarioConfig& cfg, const StepObserver& observer = {});

/// Runs independent scenarios concurrently; results are in config order.
std::vector<SimTrace> run_batch(const std::vector<ScenarioConfig>& configs);

/// Unforced response from x0 (u = 0), for natural-frequency analysis.
SimTrace open_loop_release(const ContinuousModel& m, const StateVector& x0, double duration, double T_s = 0.002);

/// Built-in scenarios: "healthy", "fig7", "1-blade", "2-blade", "4-blade",
/// "8-blade". Throws InvalidParameter for unknown names.
ScenarioConfig preset_scenario(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace aero_ftc
