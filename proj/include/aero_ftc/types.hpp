#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace aero_ftc {

// State ordering is [pitch, yaw, pitch_rate, yaw_rate]; input ordering is
// [V_pitch_motor, V_yaw_motor]. Angles are radians everywhere inside the
// library; degrees only appear at the CSV / config boundary.
inline constexpr int kStates = 4;
inline constexpr int kInputs = 2;
inline constexpr int kAugmented = kStates + kInputs;

using StateVector = Eigen::Matrix<double, kStates, 1>;
using InputVector = Eigen::Matrix<double, kInputs, 1>;
using StateMatrix = Eigen::Matrix<double, kStates, kStates>;
using InputMatrix = Eigen::Matrix<double, kStates, kInputs>;
using GainMatrix = Eigen::Matrix<double, kInputs, kStates>;
using InputWeight = Eigen::Matrix<double, kInputs, kInputs>;

using AugVector = Eigen::Matrix<double, kAugmented, 1>;
using AugMatrix = Eigen::Matrix<double, kAugmented, kAugmented>;
using AugInputMatrix = Eigen::Matrix<double, kAugmented, kInputs>;
using AugOutputMatrix = Eigen::Matrix<double, kStates, kAugmented>;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Physically meaningless parameter (non-positive inertia, bad weights, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Value outside its mathematical domain, e.g. a fault parameter outside [0, 1].
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative solver failed; carries the last residual it reached.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Linear algebra breakdown (singular matrix); carries a condition estimate.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace aero_ftc
