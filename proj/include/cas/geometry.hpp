#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "cas/advisory.hpp"

namespace cas {

/// NMAC volume: strictly closer than these in both directions.
inline constexpr double kNmacVertical = 100.0;     // ft
inline constexpr double kNmacHorizontal = 500.0;   // ft

/// State of the vertical logic. `h` is intruder minus ownship altitude.
struct VerticalState {
  double h = 0.0;      // ft
  double hdot0 = 0.0;  // ownship vertical rate, ft/s
  double hdot1 = 0.0;  // intruder vertical rate, ft/s
  Advisory a_prev = Advisory::COC;
  int tau = 0;         // s, time to loss of horizontal separation

  friend bool operator==(const VerticalState&, const VerticalState&) = default;
};

/// Negates altitude and rates and swaps the sense of the previous advisory.
inline VerticalState mirror(const VerticalState& s) {
  return {-s.h, -s.hdot0, -s.hdot1, mirror(s.a_prev), s.tau};
}

/// Horizontal relative geometry in the ownship heading frame.
struct HorizontalGeometry {
  double r = 0.0;      // ft
  double theta = 0.0;  // bearing of intruder relative to ownship heading, rad
  double psi = 0.0;    // intruder heading relative to ownship heading, rad
  double v0 = 0.0;     // ft/s
  double v1 = 0.0;     // ft/s
};

/// Wraps an angle to (-pi, pi].
double normalize_angle(double rad);

/// Validates ranges and normalizes angles; throws std::invalid_argument.
HorizontalGeometry make_geometry(double r, double theta, double psi, double v0, double v1);

/// Point-mass kinematic state, feet and feet/second.
struct AircraftState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // x, y, z (z = altitude)
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // vx, vy, vz
};

/// Smallest t >= 0 at which the constant-velocity horizontal range is within `threshold`.
/// Returns 0 when already inside and nullopt when the range never gets that small.
std::optional<double> horizontal_tau(const Eigen::Vector2d& relative_position,
                                     const Eigen::Vector2d& relative_velocity, double threshold);

std::optional<double> horizontal_tau(const HorizontalGeometry& g, double threshold);

std::optional<double> horizontal_tau(const AircraftState& own, const AircraftState& intruder,
                                     double threshold);

/// Near mid-air collision test on absolute separations. Throws on negative input.
bool is_nmac(double dz, double dxy);

bool is_nmac(const AircraftState& a, const AircraftState& b);

/// Weighted particle approximation of the vertical state.
class BeliefState {
 public:
  struct Particle {
    VerticalState state;
    double weight = 0.0;
  };

  /// Throws std::invalid_argument if empty, any weight is negative, or weights do not sum to 1.
  explicit BeliefState(std::vector<Particle> particles);

  static BeliefState point_mass(const VerticalState& s);
  /// Normalizes non-negative weights that sum to a positive value.
  static BeliefState normalized(std::vector<Particle> particles);

  const std::vector<Particle>& particles() const { return particles_; }
  std::size_t size() const { return particles_.size(); }

 private:
  std::vector<Particle> particles_;
};

inline constexpr double kWeightTolerance = 1e-9;

}  // namespace cas
