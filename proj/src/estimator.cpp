#include "aero_ftc/estimator.hpp"

#include <limits>
#include <string>

namespace aero_ftc {

AugmentedModel build_augmented(const DiscreteModel& dm, const InputVector& u_k) {
  AugmentedModel am;
  am.N_k = -dm.B_k * u_k.asDiagonal();
  am.A_a.setIdentity();
  am.A_a.topLeftCorner<kStates, kStates>() = dm.A_k;
  am.A_a.topRightCorner<kStates, kInputs>() = am.N_k;
  am.B_a.setZero();
  am.B_a.topRows<kStates>() = dm.B_k;
  am.C_a.setZero();
  am.C_a.leftCols<kStates>() = dm.C_k;
  return am;
}

void NoiseConfig::validate() const {
  if ((Q_a - Q_a.transpose()).cwiseAbs().maxCoeff() > 1e-15) throw InvalidParameter("Q_a must be symmetric");
  if ((R_a - R_a.transpose()).cwiseAbs().maxCoeff() > 1e-15) throw InvalidParameter("R_a must be symmetric");
  Eigen::SelfAdjointEigenSolver<AugMatrix> qe(Q_a, Eigen::EigenvaluesOnly);
  if (qe.eigenvalues().minCoeff() < 0.0) throw InvalidParameter("Q_a must be positive semidefinite");
  Eigen::SelfAdjointEigenSolver<StateMatrix> re(R_a, Eigen::EigenvaluesOnly);
  if (re.eigenvalues().minCoeff() <= 0.0) throw InvalidParameter("R_a must be positive definite");
}

AugmentedEstimate predict(const AugmentedEstimate& est, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::VectorXd& u_prev, const Eigen::MatrixXd& Q) {
  AugmentedEstimate out;
  out.x = A * est.x + B * u_prev;
  out.P = A * est.P * A.transpose() + Q;
  return out;
}

Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& P_pred, const Eigen::MatrixXd& C, const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd S = C * P_pred * C.transpose() + R;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  const auto d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  if (ldlt.info() != Eigen::Success || !(d.minCoeff() > dmax * std::numeric_limits<double>::epsilon())) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    const auto sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    throw NumericalError("innovation covariance is singular (condition " + std::to_string(cond) + ")", cond);
  }
  // K = P C' S^-1  <=>  S K' = C P'
  return ldlt.solve(C * P_pred.transpose()).transpose();
}

AugmentedEstimate correct(const AugmentedEstimate& pred, const Eigen::MatrixXd& K, const Eigen::MatrixXd& C,
                          const Eigen::VectorXd& y) {
  AugmentedEstimate out;
  out.x = pred.x + K * (y - C * pred.x);
  out.P = pred.P - K * C * pred.P;
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  return out;
}

InputVector clamp_fault(const InputVector& gamma_raw) { return gamma_raw.cwiseMax(0.0).cwiseMin(1.0); }

AugmentedEstimate filter_step(const AugmentedEstimate& est, const DiscreteModel& dm, const InputVector& u_applied,
                              const StateVector& y_k, const NoiseConfig& noise) {
  const AugmentedModel am = build_augmented(dm, u_applied);
  const AugmentedEstimate pred = predict(est, am, u_applied, noise.Q_a);
  const Eigen::MatrixXd K = kalman_gain(pred.P, am.C_a, noise.R_a);
  return correct(pred, K, am.C_a, y_k);
}

FaultEstimator::FaultEstimator(DiscreteModel dm, NoiseConfig noise, Prior prior)
    : dm_(std::move(dm)), noise_(std::move(noise)), prior_(prior) {
  noise_.validate();
  if (!(prior_.state_variance > 0.0) || !(prior_.fault_variance > 0.0)) {
    throw InvalidParameter("estimator prior variances must be positive");
  }
}

void FaultEstimator::initialize(const StateVector& y0, const StateVector& state_offset,
                                const InputVector& fault_guess) {
  est_.x = AugVector::Zero();
  est_.x.head<kStates>() = y0 + state_offset;
  est_.x.tail<kInputs>() = fault_guess;
  AugVector diag;
  diag << StateVector::Constant(prior_.state_variance), InputVector::Constant(prior_.fault_variance);
  est_.P = diag.asDiagonal();
  initialized_ = true;
}

void FaultEstimator::update(const InputVector& u_applied, const StateVector& y_k) {
  if (!initialized_) {
    initialize(y_k);
    return;
  }
  est_ = filter_step(est_, dm_, u_applied, y_k, noise_);
}

}  // namespace aero_ftc
