#pragma once

#include <array>

#include "aero_ftc/model.hpp"

namespace aero_ftc {

struct AccommodationConfig {
  bool enabled = true;
  double gamma_max = 0.95;             // cap on the estimate used for compensation
  double activation_threshold = 0.05;  // estimates below this are treated as healthy

  /// 0 < gamma_max < 1 and 0 <= activation_threshold < gamma_max.
  void validate() const;
};

/// Fault-compensated command.
///
/// Each channel is divided by (1 - g_i), g_i being the estimate clamped to
/// [0, gamma_max], once g_i reaches the activation threshold. After the
/// actuator applies its loss of effectiveness (1 - gamma_i), the realized
/// input is u_i (1 - gamma_i) / (1 - g_i), i.e. exactly u_i when the
/// estimate is exact. The additive law u_f = (1 - gamma) u + g u produces the
/// same realized input in that case but would need the true gamma at the
/// actuator to be injected. The result is not saturated; see saturate().
InputVector accommodate(const InputVector& u, const InputVector& gamma_hat, const AccommodationConfig& cfg);

struct SaturatedCommand {
  InputVector volts = InputVector::Zero();
  std::array<bool, kInputs> saturated{false, false};
};

/// Clips each channel to [u_min, u_max] and flags clipped channels.
SaturatedCommand saturate(const InputVector& u, double u_min, double u_max);

}  // namespace aero_ftc
