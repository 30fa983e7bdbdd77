#pragma once

#include <string_view>

#include "aero_ftc/types.hpp"

namespace aero_ftc {

/// Physical constants of the bench rig. Defaults are the identified values
/// published for the Aero 2 2-DOF helicopter.
struct PhysicalParams {
  double D_t = 0.1674;     // m, pivot to rotor centre
  double K_pp = 0.00321;   // N/V, front rotor -> pitch
  double K_py = 0.00137;   // N/V, rear rotor -> pitch
  double K_yy = 0.00610;   // N/V, rear rotor -> yaw
  double K_yp = -0.00319;  // N/V, front rotor -> yaw
  double K_sp = 0.00744;   // pitch stiffness
  double D_p = 0.00199;    // pitch damping
  double D_y = 0.00192;    // yaw damping
  double J_p = 0.0232;     // kg m^2
  double J_y = 0.0238;     // kg m^2

  /// Throws InvalidParameter unless J_p, J_y, D_t are strictly positive.
  void validate() const;
};

/// Continuous LTI plant x' = A x + B u, y = C x with symmetric input limits.
struct ContinuousModel {
  StateMatrix A = StateMatrix::Zero();
  InputMatrix B = InputMatrix::Zero();
  StateMatrix C = StateMatrix::Identity();
  double u_min = -24.0;  // V
  double u_max = 24.0;   // V

  /// The identified A and B blocks as printed for the Aero 2 rig. These are
  /// the canonical defaults. They are not exactly reproducible from
  /// PhysicalParams (e.g. -K_sp/J_p = -0.3207 against the printed -0.3190).
  static ContinuousModel aero2();
};

/// Assembles A and B from the rigid-body torque balance about each axis.
ContinuousModel build_continuous_model(const PhysicalParams& params);

/// Per-rotor loss of control effectiveness, each component in [0, 1].
/// 0 is a healthy actuator, 1 a complete failure.
class FaultVector {
 public:
  FaultVector() = default;
  /// Throws DomainError if any component is outside [0, 1] or not finite.
  explicit FaultVector(const InputVector& gamma);
  FaultVector(double gamma0, double gamma1) : FaultVector(InputVector(gamma0, gamma1)) {}

  static FaultVector healthy() { return {}; }

  const InputVector& values() const noexcept { return gamma_; }
  double operator[](int i) const { return gamma_(i); }

  friend bool operator==(const FaultVector& a, const FaultVector& b) {
    return a.gamma_ == b.gamma_;
  }

 private:
  InputVector gamma_ = InputVector::Zero();
};

/// Loss-of-effectiveness value for a blade-break condition on one rotor,
/// proportional to the fraction of the 8-blade propeller lost. This is a
/// modelling convenience, not a calibrated thrust map.
enum class BladeBreak { kNone, kOne, kTwo, kFour, kEight };

double blade_break_gamma(BladeBreak preset);

/// Parses "healthy", "1-blade", "2-blade", "4-blade", "8-blade".
/// Throws InvalidParameter on anything else.
BladeBreak parse_blade_break(std::string_view name);

/// Realized actuator input (1 - gamma_i) * u_i.
InputVector apply_fault(const InputVector& u, const FaultVector& gamma);

/// A x + B u_eff.
StateVector derivative(const ContinuousModel& m, const StateVector& x, const InputVector& u_eff);

/// Zero-order-hold discretization of a ContinuousModel.
struct DiscreteModel {
  StateMatrix A_k = StateMatrix::Identity();
  InputMatrix B_k = InputMatrix::Zero();
  StateMatrix C_k = StateMatrix::Identity();
  double T_s = 0.002;
};

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The argument is scaled by 2^-s until its 1-norm is at most 0.5, the series
/// is summed to order kExpmTaylorOrder and the result is squared s times.
/// With ||X|| <= 0.5 the truncation term is below 0.5^13 / 13! ~ 2e-14,
/// i.e. under double precision roundoff relative to ||exp(X)|| >= e^-0.5.
inline constexpr int kExpmTaylorOrder = 12;
Eigen::MatrixXd expm(const Eigen::MatrixXd& X);

/// ZOH discretization. A_k = exp(A T_s) and B_k = int_0^T_s exp(A t) dt B,
/// both read off exp([[A, B], [0, 0]] T_s). Throws InvalidParameter if
/// T_s <= 0.
DiscreteModel discretize_zoh(const ContinuousModel& m, double T_s);

}  // namespace aero_ftc
