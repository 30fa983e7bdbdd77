#include "aero_ftc/sim.hpp"

#include <cmath>
#include <future>
#include <optional>
#include <random>
#include <sstream>

namespace aero_ftc {

double reference_square(double t, const AxisReference& axis) {
  if (!(axis.period > 0.0)) throw InvalidParameter("reference period must be positive");
  double tau = std::fmod(t - axis.phase, axis.period);
  if (tau < 0.0) tau += axis.period;
  const double amp = deg_to_rad(axis.amplitude_deg);
  return tau < 0.5 * axis.period ? amp : -amp;
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0)) throw InvalidParameter("sim.duration must be positive");
  if (!(T_s > 0.0)) throw InvalidParameter("sim.T_s must be positive");
  if (T_s > duration) throw InvalidParameter("sim.T_s exceeds sim.duration");
  if (!(pitch.period > 0.0)) throw InvalidParameter("reference.pitch.period must be positive");
  if (!(yaw.period > 0.0)) throw InvalidParameter("reference.yaw.period must be positive");
  if (std::abs(pitch.amplitude_deg) > pitch_limit_deg) {
    throw InvalidParameter("reference.pitch.amplitude_deg exceeds the pitch limit of " +
                           std::to_string(pitch_limit_deg) + " deg");
  }
  for (std::size_t i = 0; i < faults.size(); ++i) {
    if (faults[i].time < 0.0 || faults[i].time > duration) {
      throw InvalidParameter("faults[" + std::to_string(i) + "].time outside [0, duration]");
    }
    if (i > 0 && faults[i].time < faults[i - 1].time) {
      throw InvalidParameter("faults must be sorted by time");
    }
  }
  if (!(model.u_min < model.u_max)) throw InvalidParameter("model.u_min must be below model.u_max");
  if ((measurement_noise_std.array() < 0.0).any()) throw InvalidParameter("measurement noise std must be >= 0");
  if ((process_noise_std.array() < 0.0).any()) throw InvalidParameter("process noise std must be >= 0");
  if (!(divergence_limit > 0.0)) throw InvalidParameter("divergence limit must be positive");
  if (!(prior.state_variance > 0.0) || !(prior.fault_variance > 0.0)) {
    throw InvalidParameter("estimator prior variances must be positive");
  }
  weights.validate();
  noise.validate();
  accommodation.validate();
}

std::size_t ScenarioConfig::sample_count() const {
  return static_cast<std::size_t>(std::floor(duration / T_s + 1e-9)) + 1;
}

namespace {

template <typename F>
std::vector<double> column(const SimTrace& tr, F&& f) {
  std::vector<double> out;
  out.reserve(tr.samples.size());
  for (const auto& s : tr.samples) out.push_back(f(s));
  return out;
}

std::size_t onset_index(double time, double T_s) {
  return static_cast<std::size_t>(std::ceil(time / T_s - 1e-9));
}

}  // namespace

std::vector<double> SimTrace::time() const {
  return column(*this, [](const TraceSample& s) { return s.t; });
}
std::vector<double> SimTrace::reference(int axis) const {
  return column(*this, [axis](const TraceSample& s) { return axis == 0 ? s.r_pitch : s.r_yaw; });
}
std::vector<double> SimTrace::angle(int axis) const {
  return column(*this, [axis](const TraceSample& s) { return s.x(axis); });
}
std::vector<double> SimTrace::command(int motor) const {
  return column(*this, [motor](const TraceSample& s) { return s.u_cmd(motor); });
}
std::vector<double> SimTrace::fault_estimate(int motor) const {
  return column(*this, [motor](const TraceSample& s) { return s.gamma_raw(motor); });
}

StateVector integrate_step(const ContinuousModel& m, const StateVector& x, const InputVector& u_eff, double T_s) {
  return rk4_step([&](const StateVector& s) { return derivative(m, s, u_eff); }, x, T_s);
}

SimTrace run_scenario(const ScenarioConfig& cfg, const StepObserver& observer) {
  cfg.validate();

  const LqrController lqr = LqrController::synthesize(cfg.model, cfg.weights, cfg.care);
  const DiscreteModel dm = discretize_zoh(cfg.model, cfg.T_s);
  std::optional<FaultEstimator> estimator;
  if (cfg.estimator_enabled) estimator.emplace(dm, cfg.noise, cfg.prior);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](const StateVector& std_dev) {
    StateVector v;
    for (int i = 0; i < kStates; ++i) v(i) = normal(rng);
    return StateVector(std_dev.cwiseProduct(v));
  };

  const std::size_t n = cfg.sample_count();
  SimTrace trace;
  trace.T_s = cfg.T_s;
  trace.samples.reserve(n);

  StateVector x = cfg.x0;
  InputVector u_applied = InputVector::Zero();
  FaultVector gamma_true;
  std::size_t next_fault = 0;

  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.T_s;
    while (next_fault < cfg.faults.size() && onset_index(cfg.faults[next_fault].time, cfg.T_s) <= k) {
      gamma_true = cfg.faults[next_fault].gamma;
      ++next_fault;
    }

    const StateVector y = cfg.model.C * x + draw(cfg.measurement_noise_std);

    InputVector gamma_raw = InputVector::Zero();
    InputVector gamma_clamped = InputVector::Zero();
    StateVector x_ctrl = y;
    if (estimator) {
      if (k == 0) {
        estimator->initialize(y, cfg.estimator_state_offset, cfg.estimator_fault_guess);
      } else {
        estimator->update(u_applied, y);
      }
      gamma_raw = estimator->fault_raw();
      gamma_clamped = estimator->fault_clamped();
      if (cfg.control_from_estimate) x_ctrl = estimator->state();
    }

    TraceSample s;
    s.t = t;
    s.r_pitch = reference_square(t, cfg.pitch);
    s.r_yaw = reference_square(t, cfg.yaw);
    const StateVector r(s.r_pitch, s.r_yaw, 0.0, 0.0);

    s.x = x;
    s.u_lqr = lqr(r, x_ctrl);
    const SaturatedCommand cmd =
        saturate(accommodate(s.u_lqr, gamma_clamped, cfg.accommodation), cfg.model.u_min, cfg.model.u_max);
    s.u_cmd = cmd.volts;
    s.saturated = cmd.saturated;
    s.u_eff = apply_fault(s.u_cmd, gamma_true);
    s.gamma_true = gamma_true.values();
    s.gamma_raw = gamma_raw;
    s.gamma_clamped = gamma_clamped;
    trace.samples.push_back(s);

    if (observer) observer(StepView{k, t, x, s.gamma_true, estimator ? &*estimator : nullptr});

    if (!x.allFinite() || x.norm() > cfg.divergence_limit) {
      std::ostringstream msg;
      msg << "simulation diverged at t=" << t << " s (|x| = " << x.norm() << ")";
      throw DivergenceError(msg.str(), std::move(trace));
    }

    if (k + 1 < n) {
      x = integrate_step(cfg.model, x, s.u_eff, cfg.T_s) + draw(cfg.process_noise_std);
      u_applied = s.u_cmd;
    }
  }
  return trace;
}

std::vector<SimTrace> run_batch(const std::vector<ScenarioConfig>& configs) {
  std::vector<std::future<SimTrace>> jobs;
  jobs.reserve(configs.size());
  for (const auto& cfg : configs) {
    jobs.push_back(std::async(std::launch::async, [&cfg] { return run_scenario(cfg); }));
  }
  std::vector<SimTrace> out;
  out.reserve(configs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

SimTrace open_loop_release(const ContinuousModel& m, const StateVector& x0, double duration, double T_s) {
  if (!(T_s > 0.0) || !(duration > 0.0)) throw InvalidParameter("release needs positive duration and T_s");
  const std::size_t n = static_cast<std::size_t>(std::floor(duration / T_s + 1e-9)) + 1;
  SimTrace trace;
  trace.T_s = T_s;
  trace.samples.reserve(n);
  StateVector x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    TraceSample s;
    s.t = static_cast<double>(k) * T_s;
    s.x = x;
    trace.samples.push_back(s);
    x = integrate_step(m, x, InputVector::Zero(), T_s);
  }
  return trace;
}

std::vector<std::string> preset_names() { return {"healthy", "fig7", "1-blade", "2-blade", "4-blade", "8-blade"}; }

ScenarioConfig preset_scenario(std::string_view name) {
  ScenarioConfig cfg;
  cfg.name = std::string(name);
  cfg.duration = 160.0;
  cfg.seed = 7;
  if (name == "healthy") return cfg;
  if (name == "fig7") {
    // Loss of effectiveness 0.7 on both rotors injected mid-run, with the
    // estimator feeding accommodation.
    cfg.faults.push_back({80.0, FaultVector(0.7, 0.7)});
    return cfg;
  }
  // Blade-break fault analysis: conventional LQR, fault present from the start.
  const BladeBreak preset = parse_blade_break(name);
  const double g = blade_break_gamma(preset);
  cfg.accommodation.enabled = false;
  cfg.faults.push_back({0.0, preset == BladeBreak::kOne ? FaultVector(g, 0.0) : FaultVector(g, g)});
  return cfg;
}

}  // namespace aero_ftc
