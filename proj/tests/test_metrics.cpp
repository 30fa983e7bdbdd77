#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "aero_ftc/metrics.hpp"
#include "aero_ftc/sim.hpp"

using namespace aero_ftc;

namespace {

struct Signal {
  std::vector<double> t, y;
};

template <typename F>
Signal sample(F f, double duration, double dt) {
  Signal s;
  const auto n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    s.t.push_back(t);
    s.y.push_back(f(t));
  }
  return s;
}

SegmentResponse whole(const Signal& s, double r_before, double r_after) {
  return {s.t, s.y, r_before, r_after};
}

// Unit step response of a standard second-order system.
double second_order(double t, double zeta, double wn) {
  if (zeta == 1.0) return 1.0 - (1.0 + wn * t) * std::exp(-wn * t);
  const double wd = wn * std::sqrt(1.0 - zeta * zeta);
  return 1.0 - std::exp(-zeta * wn * t) / std::sqrt(1.0 - zeta * zeta) * std::sin(wd * t + std::acos(zeta));
}

}  // namespace

TEST_CASE("segment_steps") {
  const std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> r{0, 0, 1, 1, 1, -1, -1, -1};
  MetricOptions opts;
  opts.min_segment_duration = 1.0;
  const auto segs = segment_steps(t, r, opts);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].begin == 2);
  CHECK(segs[0].end == 5);
  CHECK(segs[0].magnitude() == 1.0);
  CHECK(segs[1].begin == 5);
  CHECK(segs[1].end == 8);
  CHECK(segs[1].magnitude() == -2.0);

  opts.min_segment_duration = 3.0;
  CHECK(segment_steps(t, r, opts).size() == 1);

  const std::vector<double> flat(8, 0.3);
  CHECK(segment_steps(t, flat).empty());
  CHECK_THROWS_AS(segment_steps(t, std::vector<double>(3, 0.0)), MetricError);
}

TEST_CASE("rise time of a first-order lag is tau ln 9") {
  for (double tau : {0.5, 2.0, 7.0}) {
    const Signal s = sample([tau](double t) { return 1.0 - std::exp(-t / tau); }, 12.0 * tau, 1e-3);
    const auto tr = rise_time(whole(s, 0.0, 1.0));
    REQUIRE(tr);
    CHECK(std::abs(*tr - tau * std::log(9.0)) < 1e-5);
  }
  SUBCASE("never reaching 90 %") {
    const Signal s = sample([](double t) { return 0.5 * (1.0 - std::exp(-t)); }, 10.0, 1e-2);
    CHECK_FALSE(rise_time(whole(s, 0.0, 1.0)).has_value());
  }
}

TEST_CASE("overshoot of second-order responses") {
  SUBCASE("zeta = 0.5 peaks at exp(-pi zeta / sqrt(1 - zeta^2))") {
    const double expected = 100.0 * std::exp(-std::numbers::pi * 0.5 / std::sqrt(0.75));
    CHECK(expected == doctest::Approx(16.303).epsilon(1e-4));
    const Signal s = sample([](double t) { return second_order(t, 0.5, 1.0); }, 80.0, 1e-3);
    CHECK(std::abs(overshoot(whole(s, 0.0, 1.0)) - expected) < 1e-3);
  }
  SUBCASE("critical damping does not overshoot") {
    const Signal s = sample([](double t) { return second_order(t, 1.0, 1.0); }, 80.0, 1e-3);
    CHECK(overshoot(whole(s, 0.0, 1.0)) == 0.0);
  }
  SUBCASE("negative steps measure overshoot below the target") {
    const Signal s = sample([](double t) { return 3.0 - 2.0 * second_order(t, 0.5, 1.0); }, 80.0, 1e-3);
    CHECK(std::abs(overshoot(whole(s, 3.0, 1.0)) - 16.303) < 1e-2);
  }
}

TEST_CASE("steady-state error") {
  const Signal s = sample([](double t) { return t < 1.0 ? t : 0.95; }, 20.0, 0.01);
  CHECK(steady_state_error(whole(s, 0.0, 1.0)) == doctest::Approx(5.0).epsilon(1e-12));
  const Signal neg = sample([](double) { return -0.9; }, 20.0, 0.01);
  CHECK(steady_state_error(whole(neg, 0.0, -1.0)) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("steady_state_start") {
  CHECK(steady_state_start(100, 0.25) == 75);
  CHECK(steady_state_start(10, 0.25) == 7);
  CHECK(steady_state_start(1, 0.25) == 0);
  CHECK(steady_state_start(5, 0.0) == 4);
}

TEST_CASE("population standard deviation") {
  CHECK(steady_state_sd(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(2.0).epsilon(1e-15));
  for (double a : {0.1, 1.0, 3.0}) {
    // Whole periods of a sinusoid: SD = a / sqrt(2).
    const Signal s = sample([a](double t) { return a * std::sin(2.0 * std::numbers::pi * t); }, 10.0 - 1e-3, 1e-3);
    CHECK(std::abs(steady_state_sd(s.y) - a / std::sqrt(2.0)) / (a / std::sqrt(2.0)) < 1e-3);
  }
  CHECK_THROWS_AS(steady_state_sd(std::vector<double>{1.0}), MetricError);
}

TEST_CASE("natural_frequency") {
  for (double dt : {1e-3, 2e-3, 1e-2, 5e-2}) {
    const Signal s = sample([](double t) { return std::sin(0.5 * t); }, 60.0, dt);
    CHECK(std::abs(natural_frequency(s.t, s.y) - 0.5) < 1e-3);
  }
  const Signal damped = sample([](double t) { return 0.2 * std::exp(-0.06 * t) * std::cos(0.5618 * t); }, 60.0, 2e-3);
  CHECK(std::abs(natural_frequency(damped.t, damped.y) - 0.5618) < 1e-4);

  const Signal offset = sample([](double t) { return 2.0 + std::sin(0.5 * t); }, 60.0, 1e-2);
  CHECK(std::abs(natural_frequency(offset.t, offset.y, 2.0) - 0.5) < 1e-3);

  const Signal decay = sample([](double t) { return std::exp(-t); }, 10.0, 1e-2);
  CHECK_THROWS_AS(natural_frequency(decay.t, decay.y), MetricError);
}

TEST_CASE("metrics are invariant to offset and scale of the step") {
  const Signal base = sample([](double t) { return second_order(t, 0.4, 2.0); }, 40.0, 1e-3);
  const SegmentResponse r0 = whole(base, 0.0, 1.0);
  for (auto [shift, scale] : {std::pair{5.0, 1.0}, std::pair{-2.0, 3.0}, std::pair{0.0, -0.5}}) {
    Signal s = base;
    for (double& y : s.y) y = shift + scale * y;
    const SegmentResponse r1 = whole(s, shift, shift + scale);
    CHECK(std::abs(*rise_time(r1) - *rise_time(r0)) < 1e-9);
    CHECK(std::abs(overshoot(r1) - overshoot(r0)) < 1e-9);
    CHECK(std::abs(steady_state_error(r1) - steady_state_error(r0)) < 1e-9);
  }
}

TEST_CASE("zero-magnitude step is rejected") {
  const Signal s = sample([](double) { return 1.0; }, 1.0, 0.1);
  CHECK_THROWS_AS(overshoot(whole(s, 1.0, 1.0)), MetricError);
}

TEST_CASE("closed-loop rise time agrees with an independent discrete simulation") {
  ScenarioConfig cfg;
  cfg.duration = 40.0;
  cfg.estimator_enabled = false;
  cfg.measurement_noise_std.setZero();
  cfg.yaw.amplitude_deg = 0.0;
  cfg.pitch = {10.0, 40.0, 0.0};
  const SimTrace tr = run_scenario(cfg);
  const MetricsReport rep = compute_metrics(tr);
  REQUIRE(rep.pitch.segments == 1);  // one transition at t = 20 s
  REQUIRE(rep.pitch.rise_time);

  // Oracle: exact zero-order-hold recursion with the same gain.
  const DiscreteModel d = discretize_zoh(cfg.model, cfg.T_s);
  const LqrController c = LqrController::synthesize(cfg.model, cfg.weights);
  const double a = deg_to_rad(10.0);
  StateVector x = StateVector::Zero();
  Signal s;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double t = static_cast<double>(k) * cfg.T_s;
    const StateVector r(t < 20.0 ? a : -a, 0.0, 0.0, 0.0);
    if (t >= 20.0) {
      s.t.push_back(t);
      s.y.push_back(x(0));
    }
    InputVector u = c.K * (r - x);
    u = u.cwiseMax(-24.0).cwiseMin(24.0);
    x = d.A_k * x + d.B_k * u;
  }
  const auto oracle = rise_time(SegmentResponse{s.t, s.y, a, -a});
  REQUIRE(oracle);
  CHECK(std::abs(*rep.pitch.rise_time - *oracle) < 2.0 * cfg.T_s);

  // Pitch settles with a visible offset from the reference.
  CHECK(rep.pitch.sse > 1.0);
  CHECK(rep.pitch.sse < 10.0);
}

TEST_CASE("compute_metrics restricted to later transitions") {
  ScenarioConfig cfg;
  cfg.duration = 100.0;
  cfg.measurement_noise_std.setZero();
  const SimTrace tr = run_scenario(cfg);
  const MetricsReport all = compute_metrics(tr);
  const MetricsReport late = compute_metrics(tr, {}, 50.0);
  CHECK(all.steps.size() > late.steps.size());
  for (const auto& st : late.steps) CHECK(st.t_start >= 50.0);
  CHECK(late.steps.size() == late.step_vibration.size());

  const std::string csv = metrics_csv(all);
  CHECK(csv.rfind("axis,segment,t_start,r_before_deg,r_after_deg,rise_time_s,overshoot_pct,sse_pct,angle_sd_deg,"
                  "voltage_sd_v\n",
                  0) == 0);
  CHECK(!metrics_table(all).empty());
}
