#include "aero_ftc/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aero_ftc {
namespace {

bool is_symmetric(const Eigen::MatrixXd& M, double tol) {
  return M.rows() == M.cols() && (M - M.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& R, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
  if (!lu.isInvertible()) {
    throw NumericalError(std::string(what) + " is singular", std::numeric_limits<double>::infinity());
  }
  return lu.inverse();
}

}  // namespace

void LqrWeights::validate() const {
  if (!is_symmetric(Q, 1e-12)) throw InvalidParameter("LQR weight Q must be symmetric");
  if (min_eigenvalue(Q) < -1e-12) throw InvalidParameter("LQR weight Q must be positive semidefinite");
  if (!is_symmetric(R, 1e-12)) throw InvalidParameter("LQR weight R must be symmetric");
  if (min_eigenvalue(R) <= 0.0) throw InvalidParameter("LQR weight R must be positive definite");
}

double care_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                     const Eigen::MatrixXd& R, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd BRinvBt = B * R.ldlt().solve(B.transpose());
  return (A.transpose() * P + P * A - P * BRinvBt * P + Q).norm();
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd At = A.transpose();
  // vec(A' X) = (I (x) A') vec(X);  vec(X A) = (A' (x) I) vec(X)  (column-major vec)
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) = I(i, j) * At + At(i, j) * I;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(op);
  if (!lu.isInvertible()) {
    throw NumericalError("Lyapunov operator is singular", 1.0 / lu.rcond());
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  Eigen::VectorXd vecX = lu.solve(rhs);
  Eigen::MatrixXd X = Eigen::Map<Eigen::MatrixXd>(vecX.data(), n, n);
  return 0.5 * (X + X.transpose());
}

double spectral_abscissa(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return es.eigenvalues().real().maxCoeff();
}

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& P, const Eigen::MatrixXd& B, const Eigen::MatrixXd& R) {
  if (R.rows() != R.cols() || R.rows() != B.cols() || P.rows() != B.rows()) {
    throw InvalidParameter("lqr_gain: dimension mismatch");
  }
  return checked_inverse(R, "input weight R") * B.transpose() * P;
}

CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                        const Eigen::MatrixXd& R, const CareOptions& opts) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != m || R.cols() != m) {
    throw InvalidParameter("solve_care: dimension mismatch");
  }
  if (!(opts.tol > 0.0)) throw InvalidParameter("solve_care: tol must be positive");
  if (!is_symmetric(R, 1e-12) || min_eigenvalue(R) <= 0.0) {
    throw InvalidParameter("solve_care: R must be symmetric positive definite");
  }
  const Eigen::MatrixXd Rinv = R.inverse();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  // Bootstrap gain from the shifted Lyapunov equation.
  const double beta = A.cwiseAbs().colwise().sum().maxCoeff() + 1.0;
  const Eigen::MatrixXd shifted = A + beta * I;
  // solve_lyapunov solves M' X + X M + W = 0; here M = shifted'.
  const Eigen::MatrixXd Z = solve_lyapunov(shifted.transpose(), -2.0 * B * Rinv * B.transpose());
  Eigen::LLT<Eigen::MatrixXd> zchol(Z);
  if (zchol.info() != Eigen::Success || min_eigenvalue(Z) <= 1e-14 * Z.norm()) {
    throw SolverError("solve_care: bootstrap failed, (A, B) is not controllable",
                      std::numeric_limits<double>::infinity());
  }
  Eigen::MatrixXd K = Rinv * B.transpose() * zchol.solve(I);

  CareSolution sol;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Eigen::MatrixXd Acl = A - B * K;
    if (spectral_abscissa(Acl) >= 0.0) {
      throw SolverError("solve_care: Newton iterate lost closed-loop stability; (A, B) not stabilizable",
                        sol.residuals.empty() ? std::numeric_limits<double>::infinity() : sol.residuals.back());
    }
    sol.P = solve_lyapunov(Acl, Q + K.transpose() * R * K);
    K = Rinv * B.transpose() * sol.P;
    const double res = care_residual(A, B, Q, R, sol.P);
    sol.residuals.push_back(res);
    sol.iterations = it;
    if (res < opts.tol) return sol;

    // Newton converges quadratically; a residual that stops shrinking for a
    // few iterations will not reach tol.
    if (res < 0.9 * best) {
      stalled = 0;
    } else if (++stalled >= 5) {
      throw SolverError("solve_care: residual plateaued at " + std::to_string(res) + " above tol", res);
    }
    best = std::min(best, res);
  }
  throw SolverError("solve_care: no convergence within " + std::to_string(opts.max_iter) + " iterations",
                    sol.residuals.empty() ? std::numeric_limits<double>::infinity() : sol.residuals.back());
}

InputVector control_law(const GainMatrix& K, const StateVector& r, const StateVector& x) {
  return K * (r - x);
}

LqrController LqrController::synthesize(const ContinuousModel& m, const LqrWeights& w, const CareOptions& opts) {
  w.validate();
  const CareSolution sol = solve_care(m.A, m.B, w.Q, w.R, opts);
  LqrController c;
  c.P = sol.P;
  c.K = lqr_gain(sol.P, m.B, w.R);
  c.residual = sol.residuals.back();
  c.iterations = sol.iterations;
  return c;
}

}  // namespace aero_ftc
