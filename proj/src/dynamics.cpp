#include "cas/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cas {

void PilotModel::validate() const {
  if (!(response_probability > 0.0 && response_probability <= 1.0)) {
    throw std::invalid_argument("pilot: response probability must lie in (0, 1]");
  }
  if (!(acceleration > 0.0)) throw std::invalid_argument("pilot: acceleration must be positive");
  if (!(deterministic_delay >= 0.0)) throw std::invalid_argument("pilot: negative delay");
}

void IntruderModel::validate() const {
  if (!(sigma_accel >= 0.0)) throw std::invalid_argument("intruder: negative sigma");
}

VerticalKinematics step_vertical(VerticalKinematics state, const std::optional<RateBand>& band,
                                 bool complying, const PilotModel& pilot, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_vertical: dt must be positive");
  double vz_next = state.vz;
  if (complying && band && !band->contains(state.vz)) {
    const double target = band->clamp(state.vz);
    const double max_change = pilot.acceleration * dt;
    vz_next = state.vz + std::clamp(target - state.vz, -max_change, max_change);
  }
  return {state.z + 0.5 * (state.vz + vz_next) * dt, vz_next};
}

int sample_response_delay(const PilotModel& pilot, Rng& rng) {
  if (pilot.response_probability >= 1.0) return 0;
  return std::geometric_distribution<int>(pilot.response_probability)(rng);
}

double projected_offset(VerticalKinematics own, VerticalKinematics intruder, Advisory advisory,
                        const PilotModel& pilot, double horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("projection: negative horizon");
  const double intruder_z = intruder.z + intruder.vz * horizon;
  const double coast = std::min(pilot.deterministic_delay, horizon);
  own.z += own.vz * coast;
  const auto band = rate_band(advisory);
  double remaining = horizon - coast;
  while (remaining > 1e-12) {
    const double dt = std::min(1.0, remaining);
    own = step_vertical(own, band, true, pilot, dt);
    remaining -= dt;
  }
  return own.z - intruder_z;
}

double project_template(VerticalKinematics own, VerticalKinematics intruder, Advisory advisory,
                        const PilotModel& pilot, double horizon) {
  return std::abs(projected_offset(own, intruder, advisory, pilot, horizon));
}

}  // namespace cas
