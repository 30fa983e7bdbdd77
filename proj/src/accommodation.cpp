#include "aero_ftc/accommodation.hpp"

#include <algorithm>

namespace aero_ftc {

void AccommodationConfig::validate() const {
  if (!(gamma_max > 0.0 && gamma_max < 1.0)) throw InvalidParameter("accommodation.gamma_max must lie in (0, 1)");
  if (!(activation_threshold >= 0.0 && activation_threshold < gamma_max)) {
    throw InvalidParameter("accommodation.activation_threshold must lie in [0, gamma_max)");
  }
}

InputVector accommodate(const InputVector& u, const InputVector& gamma_hat, const AccommodationConfig& cfg) {
  if (!cfg.enabled) return u;
  InputVector out = u;
  for (int i = 0; i < kInputs; ++i) {
    const double g = std::clamp(gamma_hat(i), 0.0, cfg.gamma_max);
    if (g >= cfg.activation_threshold) out(i) = u(i) / (1.0 - g);
  }
  return out;
}

SaturatedCommand saturate(const InputVector& u, double u_min, double u_max) {
  SaturatedCommand c;
  for (int i = 0; i < kInputs; ++i) {
    c.volts(i) = std::clamp(u(i), u_min, u_max);
    c.saturated[i] = c.volts(i) != u(i);
  }
  return c;
}

}  // namespace aero_ftc
