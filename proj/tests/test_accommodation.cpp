#include "doctest.h"

#include <random>

#include "aero_ftc/accommodation.hpp"

using namespace aero_ftc;

TEST_CASE("accommodate examples") {
  const AccommodationConfig cfg;
  CHECK(accommodate(InputVector(4, -2), InputVector(0, 0), cfg) == InputVector(4, -2));
  CHECK(accommodate(InputVector(2, 2), InputVector(0.5, 0), cfg) == InputVector(4, 2));

  const FaultVector gamma(0.7, 0.7);
  const InputVector u(3, 3);
  const InputVector realized = apply_fault(accommodate(u, gamma.values(), cfg), gamma);
  CHECK(realized(0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(realized(1) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("activation threshold and cap") {
  const AccommodationConfig cfg;
  CHECK(accommodate(InputVector(2, 2), InputVector(0.049, 0.05), cfg) == InputVector(2, 2 / 0.95));
  // Estimates beyond gamma_max are capped, negative estimates read as healthy.
  CHECK(accommodate(InputVector(1, 1), InputVector(1.4, -0.3), cfg)(0) == doctest::Approx(1 / 0.05));
  CHECK(accommodate(InputVector(1, 1), InputVector(1.4, -0.3), cfg)(1) == 1.0);
}

TEST_CASE("exact estimate restores the nominal input") {
  const AccommodationConfig cfg;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uu(-24.0, 24.0), gg(0.0, 0.95);
  for (int i = 0; i < 1000; ++i) {
    const InputVector u(uu(rng), uu(rng));
    const FaultVector g(gg(rng), gg(rng));
    const InputVector cmd = accommodate(u, g.values(), cfg);
    const InputVector realized = apply_fault(cmd, g);
    for (int j = 0; j < 2; ++j) {
      if (g[j] >= cfg.activation_threshold) {
        CHECK(std::abs(realized(j) - u(j)) < 1e-12);
      } else {
        CHECK(cmd(j) == u(j));
      }
    }
  }
}

TEST_CASE("command magnitude is non-decreasing in the estimate") {
  const AccommodationConfig cfg;
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double g = 0.01 * i;
    const double c = accommodate(InputVector(2.5, 0), InputVector(g, 0), cfg)(0);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("disabled accommodation is the identity") {
  AccommodationConfig cfg;
  cfg.enabled = false;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uu(-50.0, 50.0), gg(-1.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const InputVector u(uu(rng), uu(rng));
    CHECK(accommodate(u, InputVector(gg(rng), gg(rng)), cfg) == u);
  }
}

TEST_CASE("config validation") {
  AccommodationConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma_max = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg.gamma_max = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg = AccommodationConfig{};
  cfg.activation_threshold = 0.95;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg.activation_threshold = -0.1;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
}

TEST_CASE("saturate") {
  const SaturatedCommand c = saturate(InputVector(30, -5), -24, 24);
  CHECK(c.volts == InputVector(24, -5));
  CHECK(c.saturated[0]);
  CHECK_FALSE(c.saturated[1]);
  const SaturatedCommand d = saturate(InputVector(-24, -24.0001), -24, 24);
  CHECK_FALSE(d.saturated[0]);
  CHECK(d.saturated[1]);
}
