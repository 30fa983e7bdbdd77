#include "aero_ftc/model.hpp"

#include <cmath>
#include <string>

namespace aero_ftc {

void PhysicalParams::validate() const {
  if (!(J_p > 0.0)) throw InvalidParameter("J_p must be positive, got " + std::to_string(J_p));
  if (!(J_y > 0.0)) throw InvalidParameter("J_y must be positive, got " + std::to_string(J_y));
  if (!(D_t > 0.0)) throw InvalidParameter("D_t must be positive, got " + std::to_string(D_t));
}

ContinuousModel ContinuousModel::aero2() {
  ContinuousModel m;
  // clang-format off
  m.A << 0,       0,  1,       0,
         0,       0,  0,       1,
        -0.3190,  0, -0.1164,  0,
         0,       0,  0,      -0.1386;
  m.B << 0,        0,
         0,        0,
         0.0216,   0.01154,
        -0.01336,  0.052;
  // clang-format on
  return m;
}

ContinuousModel build_continuous_model(const PhysicalParams& p) {
  p.validate();
  ContinuousModel m;
  m.A(0, 2) = 1.0;
  m.A(1, 3) = 1.0;
  m.A(2, 0) = -p.K_sp / p.J_p;
  m.A(2, 2) = -p.D_p / p.J_p;
  m.A(3, 3) = -p.D_y / p.J_y;
  m.B(2, 0) = p.K_pp * p.D_t / p.J_p;
  m.B(2, 1) = p.K_py * p.D_t / p.J_p;
  m.B(3, 0) = p.K_yp * p.D_t / p.J_y;
  m.B(3, 1) = p.K_yy * p.D_t / p.J_y;
  return m;
}

FaultVector::FaultVector(const InputVector& gamma) : gamma_(gamma) {
  for (int i = 0; i < kInputs; ++i) {
    if (!std::isfinite(gamma(i)) || gamma(i) < 0.0 || gamma(i) > 1.0) {
      throw DomainError("fault parameter gamma[" + std::to_string(i) +
                        "] = " + std::to_string(gamma(i)) + " outside [0, 1]");
    }
  }
}

double blade_break_gamma(BladeBreak preset) {
  switch (preset) {
    case BladeBreak::kNone: return 0.0;
    case BladeBreak::kOne: return 0.125;
    case BladeBreak::kTwo: return 0.25;
    case BladeBreak::kFour: return 0.5;
    case BladeBreak::kEight: return 1.0;
  }
  return 0.0;
}

BladeBreak parse_blade_break(std::string_view name) {
  if (name == "healthy" || name == "none") return BladeBreak::kNone;
  if (name == "1-blade") return BladeBreak::kOne;
  if (name == "2-blade") return BladeBreak::kTwo;
  if (name == "4-blade") return BladeBreak::kFour;
  if (name == "8-blade") return BladeBreak::kEight;
  throw InvalidParameter("unknown blade-break preset '" + std::string(name) + "'");
}

InputVector apply_fault(const InputVector& u, const FaultVector& gamma) {
  return (InputVector::Ones() - gamma.values()).cwiseProduct(u);
}

StateVector derivative(const ContinuousModel& m, const StateVector& x, const InputVector& u_eff) {
  return m.A * x + m.B * u_eff;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  if (n != X.cols()) throw InvalidParameter("expm needs a square matrix");

  const double norm = X.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd scaled = X / std::ldexp(1.0, squarings);

  // Horner form: I + S(I + S/2(I + S/3(...)))
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  for (int k = kExpmTaylorOrder; k >= 1; --k) {
    result = Eigen::MatrixXd::Identity(n, n) + (scaled * result) / static_cast<double>(k);
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

DiscreteModel discretize_zoh(const ContinuousModel& m, double T_s) {
  if (!(T_s > 0.0)) throw InvalidParameter("sample time must be positive");

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(kStates + kInputs, kStates + kInputs);
  block.topLeftCorner(kStates, kStates) = m.A * T_s;
  block.topRightCorner(kStates, kInputs) = m.B * T_s;
  const Eigen::MatrixXd e = expm(block);

  DiscreteModel d;
  d.A_k = e.topLeftCorner(kStates, kStates);
  d.B_k = e.topRightCorner(kStates, kInputs);
  d.C_k = m.C;
  d.T_s = T_s;
  return d;
}

}  // namespace aero_ftc
