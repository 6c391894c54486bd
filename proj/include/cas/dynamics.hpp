#pragma once

#include <optional>
#include <utility>

#include "cas/advisory.hpp"
#include "cas/random.hpp"

namespace cas {

inline constexpr double kGravity = 32.2;  // ft/s^2

/// How a pilot responds to an advisory.
struct PilotModel {
  double response_probability = 1.0 / 6.0;  // per-step probability of beginning to comply
  double acceleration = kGravity / 4.0;     // ft/s^2 once complying
  double deterministic_delay = 5.0;         // s, used by template projections

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// Random vertical acceleration of an unequipped intruder.
struct IntruderModel {
  double sigma_accel = 3.0;  // ft/s^2

  void validate() const;
};

/// Altitude and vertical rate of one aircraft.
struct VerticalKinematics {
  double z = 0.0;   // ft
  double vz = 0.0;  // ft/s
};

/// One step of point-mass vertical motion. A complying pilot accelerates toward the nearest
/// edge of `band` and stops exactly on it; otherwise the rate is held.
VerticalKinematics step_vertical(VerticalKinematics state, const std::optional<RateBand>& band,
                                 bool complying, const PilotModel& pilot, double dt);

/// Steps until a pilot begins to comply; Geometric(p) on {0, 1, 2, ...}.
int sample_response_delay(const PilotModel& pilot, Rng& rng);

/// Ownship altitude minus intruder altitude after `horizon` seconds, with the intruder at
/// constant rate and the ownship holding its rate for the deterministic delay, then complying.
double projected_offset(VerticalKinematics own, VerticalKinematics intruder, Advisory advisory,
                        const PilotModel& pilot, double horizon);

/// |projected_offset|.
double project_template(VerticalKinematics own, VerticalKinematics intruder, Advisory advisory,
                        const PilotModel& pilot, double horizon);

}  // namespace cas
