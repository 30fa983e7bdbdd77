#include "doctest.h"

#include <cmath>
#include <complex>

#include "aero_ftc/lqr.hpp"

using namespace aero_ftc;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// Riccati residual written out term by term, independent of care_residual().
double residual_oracle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                       const Eigen::MatrixXd& R, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd Rinv = R.inverse();
  Eigen::MatrixXd res = Q;
  res += A.transpose() * P;
  res += P * A;
  res -= P * B * Rinv * B.transpose() * P;
  double s = 0.0;
  for (Eigen::Index i = 0; i < res.size(); ++i) s += res(i) * res(i);
  return std::sqrt(s);
}

// Stabilizing CARE solution from the stable invariant subspace of the
// Hamiltonian [[A, -B R^-1 B'], [-Q, -A']]: P = X2 X1^-1.
Eigen::MatrixXd hamiltonian_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                                 const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd H(2 * n, 2 * n);
  H << A, -B * R.inverse() * B.transpose(), -Q, -A.transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> es(H);
  Eigen::MatrixXcd V(2 * n, n);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (es.eigenvalues()(i).real() < 0.0) V.col(c++) = es.eigenvectors().col(i);
  }
  REQUIRE(c == n);
  const Eigen::MatrixXcd P = V.bottomRows(n) * V.topRows(n).inverse();
  return P.real();
}

}  // namespace

TEST_CASE("scalar CARE closed forms") {
  SUBCASE("a = 0, b = 1, q = 1, r = 1 -> P = 1") {
    const CareSolution s = solve_care(scalar(0), scalar(1), scalar(1), scalar(1));
    CHECK(s.P(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("a = 1, b = 1, q = 2, r = 1 -> P = 1 + sqrt(3)") {
    // Positive root of -p^2 + 2p + 2 = 0 via the quadratic formula.
    const double root = (-2.0 - std::sqrt(4.0 + 8.0)) / -2.0;
    const CareSolution s = solve_care(scalar(1), scalar(1), scalar(2), scalar(1));
    CHECK(std::abs(s.P(0, 0) - root) < 1e-9);
    CHECK(std::abs(s.P(0, 0) - (1.0 + std::sqrt(3.0))) < 1e-9);
    const Eigen::MatrixXd K = lqr_gain(s.P, scalar(1), scalar(1));
    CHECK(K(0, 0) == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-12));
  }
}

TEST_CASE("CARE for the rig with the published weights") {
  const ContinuousModel m = ContinuousModel::aero2();
  const LqrWeights w;
  const CareSolution s = solve_care(m.A, m.B, w.Q, w.R);

  CHECK(residual_oracle(m.A, m.B, w.Q, w.R, s.P) < 1e-8);
  CHECK((s.P - s.P.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.P);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);

  const Eigen::MatrixXd P_ham = hamiltonian_care(m.A, m.B, w.Q, w.R);
  CHECK((s.P - P_ham).norm() / P_ham.norm() < 1e-8);

  const Eigen::MatrixXd K = lqr_gain(s.P, m.B, w.R);
  CHECK(spectral_abscissa(m.A - m.B * K) < 0.0);

  SUBCASE("residual never increases across Newton iterates") {
    for (std::size_t i = 1; i < s.residuals.size(); ++i) {
      CHECK(s.residuals[i] <= s.residuals[i - 1] + 1e-12);
    }
  }
  SUBCASE("common scaling of Q and R leaves K unchanged") {
    for (double c : {1e-3, 0.5, 7.0, 250.0}) {
      const CareSolution sc = solve_care(m.A, m.B, c * w.Q, c * w.R);
      const Eigen::MatrixXd Kc = lqr_gain(sc.P, m.B, c * w.R);
      CHECK((Kc - K).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("controller synthesis wraps the same solution") {
    const LqrController c = LqrController::synthesize(m, w);
    CHECK((c.K - K).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(c.residual < 1e-10);
  }
}

TEST_CASE("solve_care failure modes") {
  SUBCASE("uncontrollable unstable mode") {
    CHECK_THROWS_AS(solve_care(scalar(1), scalar(0), scalar(1), scalar(1)), SolverError);
  }
  SUBCASE("iteration budget exhausted reports the last residual") {
    const ContinuousModel m = ContinuousModel::aero2();
    const LqrWeights w;
    try {
      solve_care(m.A, m.B, w.Q, w.R, CareOptions{1e-10, 1});
      FAIL("expected SolverError");
    } catch (const SolverError& e) {
      CHECK(e.last_residual() > 1e-10);
      CHECK(std::isfinite(e.last_residual()));
    }
  }
  SUBCASE("R must be positive definite") {
    CHECK_THROWS_AS(solve_care(scalar(1), scalar(1), scalar(1), scalar(0)), InvalidParameter);
    CHECK_THROWS_AS(solve_care(scalar(1), scalar(1), scalar(1), scalar(-1)), InvalidParameter);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(solve_care(Eigen::MatrixXd::Zero(2, 2), scalar(1), scalar(1), scalar(1)), InvalidParameter);
  }
}

TEST_CASE("solve_lyapunov") {
  const Eigen::MatrixXd A = ContinuousModel::aero2().A - Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd Q = Eigen::Vector4d(1, 2, 3, 4).asDiagonal();
  const Eigen::MatrixXd X = solve_lyapunov(A, Q);
  CHECK((A.transpose() * X + X * A + Q).norm() < 1e-12);
  CHECK_THROWS_AS(solve_lyapunov(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)), NumericalError);
}

TEST_CASE("lqr_gain") {
  const ContinuousModel m = ContinuousModel::aero2();
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(4, 4);
  CHECK(lqr_gain(P, Eigen::MatrixXd::Zero(4, 2), LqrWeights{}.R).isZero());
  CHECK_THROWS_AS(lqr_gain(P, m.B, Eigen::MatrixXd::Zero(2, 2)), NumericalError);
}

TEST_CASE("control_law") {
  const LqrController c = LqrController::synthesize(ContinuousModel::aero2(), LqrWeights{});
  const StateVector r(0.3, -0.2, 0.0, 0.0);
  CHECK(control_law(c.K, r, r) == InputVector::Zero());

  GainMatrix K = GainMatrix::Zero();
  K(0, 0) = 2.0;
  CHECK(control_law(K, StateVector(3, 0, 0, 0), StateVector::Zero()) == InputVector(6, 0));

  const double ten_deg = deg_to_rad(10.0);
  const InputVector u = c(StateVector(ten_deg, 0, 0, 0), StateVector::Zero());
  CHECK(u(0) == doctest::Approx(c.K(0, 0) * 0.17453292519943295).epsilon(1e-14));
  CHECK(u(1) == doctest::Approx(c.K(1, 0) * 0.17453292519943295).epsilon(1e-14));
}

TEST_CASE("weight validation") {
  LqrWeights w;
  CHECK_NOTHROW(w.validate());
  w.Q(0, 1) = 1.0;
  CHECK_THROWS_AS(w.validate(), InvalidParameter);
  w = LqrWeights{};
  w.Q(0, 0) = -1.0;
  CHECK_THROWS_AS(w.validate(), InvalidParameter);
  w = LqrWeights{};
  w.R(1, 1) = 0.0;
  CHECK_THROWS_AS(w.validate(), InvalidParameter);
}
