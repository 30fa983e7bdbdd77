#pragma once

#include <vector>

#include "aero_ftc/model.hpp"

namespace aero_ftc {

struct LqrWeights {
  StateMatrix Q = StateVector(150.0, 75.0, 0.0, 0.0).asDiagonal();
  InputWeight R = InputVector(0.01, 0.01).asDiagonal();

  /// Q symmetric PSD, R symmetric PD; throws InvalidParameter otherwise.
  void validate() const;
};

struct CareOptions {
  double tol = 1e-10;  // Frobenius norm of the Riccati residual
  int max_iter = 100;
};

/// Stabilizing CARE solution plus the convergence history of the solve.
struct CareSolution {
  Eigen::MatrixXd P;
  std::vector<double> residuals;  // one entry per Kleinman iterate
  int iterations = 0;
};

/// ||A'P + PA - P B R^-1 B' P + Q||_F
double care_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                     const Eigen::MatrixXd& R, const Eigen::MatrixXd& P);

/// Solves A' X + X A + Q = 0 through the Kronecker-product linear system
/// (I (x) A' + A' (x) I) vec(X) = -vec(Q). Fine for the handful of states
/// here; cost is O(n^6). Throws NumericalError if the operator is singular
/// (A has eigenvalues summing to zero).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// Stabilizing solution of the continuous algebraic Riccati equation
///   A'P + PA - P B R^-1 B' P + Q = 0
/// by Kleinman-Newton iteration.
///
/// Bootstrap: with beta = ||A||_1 + 1, the matrix -(A + beta I) is Hurwitz,
/// so (A + beta I) Z + Z (A + beta I)' = 2 B R^-1 B' has a solution Z which
/// is positive definite iff (A, B) is controllable. K0 = R^-1 B' Z^-1 then
/// makes A - B K0 stable, since (A - B K0) Z + Z (A - B K0)' = -2 beta Z.
///
/// Each Newton step solves (A - B K)' P + P (A - B K) + Q + K' R K = 0 and
/// sets K = R^-1 B' P, stopping when the residual drops below tol.
///
/// Throws SolverError when the bootstrap fails (uncontrollable pair), when
/// an iterate loses stability, when the residual plateaus above tol, or when
/// max_iter is exhausted. InvalidParameter for bad dimensions or R not PD.
CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                        const Eigen::MatrixXd& R, const CareOptions& opts = {});

/// R^-1 B' P. Throws NumericalError when R is singular.
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& P, const Eigen::MatrixXd& B, const Eigen::MatrixXd& R);

/// u = K (r - x), before any saturation. Velocity references are zero.
InputVector control_law(const GainMatrix& K, const StateVector& r, const StateVector& x);

/// Largest real part among the eigenvalues of M.
double spectral_abscissa(const Eigen::MatrixXd& M);

struct LqrController {
  StateMatrix P = StateMatrix::Zero();
  GainMatrix K = GainMatrix::Zero();
  double residual = 0.0;
  int iterations = 0;

  static LqrController synthesize(const ContinuousModel& m, const LqrWeights& w,
                                  const CareOptions& opts = {});

  InputVector operator()(const StateVector& r, const StateVector& x) const {
    return control_law(K, r, x);
  }
};

}  // namespace aero_ftc
