#pragma once

#include <utility>

#include "aero_ftc/model.hpp"

namespace aero_ftc {

/// Discrete model extended with the fault vector as two constant states:
///
///   [x; G]_{k+1} = [[A_k, N_k], [0, I]] [x; G]_k + [B_k; 0] u_k
///   y_k          = [C_k, 0] [x; G]_k
///
/// with N_k = -B_k diag(u_k), so that B_k (I - diag(G)) u = B_k u + N_k G.
struct AugmentedModel {
  AugMatrix A_a = AugMatrix::Identity();
  AugInputMatrix B_a = AugInputMatrix::Zero();
  AugOutputMatrix C_a = AugOutputMatrix::Zero();
  InputMatrix N_k = InputMatrix::Zero();
};

/// N_k must be rebuilt from the input that is actually applied over each
/// sample interval.
AugmentedModel build_augmented(const DiscreteModel& dm, const InputVector& u_k);

/// Mean and covariance of a Gaussian estimate. Sizes are dynamic so the
/// filter primitives below work for any dimension; the fault filter uses
/// x = [state(4); fault(2)].
struct AugmentedEstimate {
  Eigen::VectorXd x;
  Eigen::MatrixXd P;

  StateVector state() const { return x.head<kStates>(); }
  InputVector fault() const { return x.tail<kInputs>(); }
};

/// Process and measurement noise of the augmented model.
struct NoiseConfig {
  AugMatrix Q_a = AugVector(1e-6, 1e-6, 1e-6, 1e-6, 1e-6, 1e-6).asDiagonal();
  StateMatrix R_a = StateMatrix::Identity() * 1e-8;  // (1e-4)^2

  /// Q_a symmetric PSD, R_a symmetric PD.
  void validate() const;
};

/// Time update: x <- A x + B u, P <- A P A' + Q.
AugmentedEstimate predict(const AugmentedEstimate& est, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::VectorXd& u_prev, const Eigen::MatrixXd& Q);

inline AugmentedEstimate predict(const AugmentedEstimate& est, const AugmentedModel& am,
                                 const InputVector& u_prev, const AugMatrix& Q_a) {
  return predict(est, am.A_a, am.B_a, u_prev, Q_a);
}

/// K = P C' (C P C' + R)^-1 using the predicted covariance. Throws
/// NumericalError (with the 2-norm condition number of the innovation
/// covariance) if that covariance is singular to working precision.
Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& P_pred, const Eigen::MatrixXd& C, const Eigen::MatrixXd& R);

/// Measurement update: x <- x + K (y - C x), P <- P - K C P, then P is
/// re-symmetrized.
AugmentedEstimate correct(const AugmentedEstimate& pred, const Eigen::MatrixXd& K, const Eigen::MatrixXd& C,
                          const Eigen::VectorXd& y);

/// Fault estimate clamped to [0, 1], for consumers that need a physical value.
InputVector clamp_fault(const InputVector& gamma_raw);

/// One filter cycle: build_augmented -> predict -> kalman_gain -> correct.
/// u_applied is the input held over the interval that ended at y_k.
AugmentedEstimate filter_step(const AugmentedEstimate& est, const DiscreteModel& dm, const InputVector& u_applied,
                              const StateVector& y_k, const NoiseConfig& noise);

/// Sequential joint state/fault estimator. Its internal fault estimate is
/// never clamped; clamping only happens where a consumer asks for it.
class FaultEstimator {
 public:
  struct Prior {
    double state_variance = 1e-3;
    double fault_variance = 0.25;
  };

  FaultEstimator(DiscreteModel dm, NoiseConfig noise, Prior prior);
  FaultEstimator(DiscreteModel dm, NoiseConfig noise) : FaultEstimator(std::move(dm), std::move(noise), Prior{}) {}

  /// x_hat(0) = y0 + state_offset, fault estimate = fault_guess.
  void initialize(const StateVector& y0, const StateVector& state_offset = StateVector::Zero(),
                  const InputVector& fault_guess = InputVector::Zero());
  void update(const InputVector& u_applied, const StateVector& y_k);

  bool initialized() const noexcept { return initialized_; }
  const AugmentedEstimate& estimate() const noexcept { return est_; }
  StateVector state() const { return est_.state(); }
  InputVector fault_raw() const { return est_.fault(); }
  InputVector fault_clamped() const { return clamp_fault(est_.fault()); }

 private:
  DiscreteModel dm_;
  NoiseConfig noise_;
  Prior prior_;
  AugmentedEstimate est_;
  bool initialized_ = false;
};

}  // namespace aero_ftc
