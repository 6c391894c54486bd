#include "cas/geometry.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cas {

double normalize_angle(double rad) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(rad, two_pi);
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  if (wrapped > std::numbers::pi) wrapped -= two_pi;
  return wrapped;
}

HorizontalGeometry make_geometry(double r, double theta, double psi, double v0, double v1) {
  if (!(r >= 0.0) || !(v0 >= 0.0) || !(v1 >= 0.0)) {
    throw std::invalid_argument("horizontal geometry: range and speeds must be non-negative");
  }
  return {r, normalize_angle(theta), normalize_angle(psi), v0, v1};
}

std::optional<double> horizontal_tau(const Eigen::Vector2d& relative_position,
                                     const Eigen::Vector2d& relative_velocity, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("horizontal_tau: negative threshold");
  const double r2 = relative_position.squaredNorm();
  const double scale = std::max(1.0, std::sqrt(r2));
  const double tol = 1e-9 * scale;
  if (std::sqrt(r2) <= threshold + tol) return 0.0;

  const double v2 = relative_velocity.squaredNorm();
  if (v2 == 0.0) return std::nullopt;
  const double t_cpa = -relative_position.dot(relative_velocity) / v2;
  if (t_cpa <= 0.0) return std::nullopt;

  const double miss = (relative_position + t_cpa * relative_velocity).norm();
  if (miss > threshold + tol) return std::nullopt;
  const double inside = std::max(0.0, threshold * threshold - miss * miss);
  return std::max(0.0, t_cpa - std::sqrt(inside / v2));
}

std::optional<double> horizontal_tau(const HorizontalGeometry& g, double threshold) {
  const Eigen::Vector2d p(g.r * std::cos(g.theta), g.r * std::sin(g.theta));
  const Eigen::Vector2d v1(g.v1 * std::cos(g.psi), g.v1 * std::sin(g.psi));
  const Eigen::Vector2d v0(g.v0, 0.0);
  return horizontal_tau(p, v1 - v0, threshold);
}

std::optional<double> horizontal_tau(const AircraftState& own, const AircraftState& intruder,
                                     double threshold) {
  const Eigen::Vector2d p = (intruder.position - own.position).head<2>();
  const Eigen::Vector2d v = (intruder.velocity - own.velocity).head<2>();
  return horizontal_tau(p, v, threshold);
}

bool is_nmac(double dz, double dxy) {
  if (!(dz >= 0.0) || !(dxy >= 0.0)) {
    throw std::invalid_argument("is_nmac: separations must be non-negative");
  }
  return dz < kNmacVertical && dxy < kNmacHorizontal;
}

bool is_nmac(const AircraftState& a, const AircraftState& b) {
  const Eigen::Vector3d d = b.position - a.position;
  return is_nmac(std::abs(d.z()), d.head<2>().norm());
}

BeliefState::BeliefState(std::vector<Particle> particles) : particles_(std::move(particles)) {
  if (particles_.empty()) throw std::invalid_argument("belief: no particles");
  double total = 0.0;
  for (const auto& p : particles_) {
    if (!(p.weight >= 0.0)) throw std::invalid_argument("belief: negative weight");
    if (p.state.tau < 0) throw std::invalid_argument("belief: negative tau");
    total += p.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("belief: weights do not sum to 1");
  }
}

BeliefState BeliefState::point_mass(const VerticalState& s) { return BeliefState({{s, 1.0}}); }

BeliefState BeliefState::normalized(std::vector<Particle> particles) {
  double total = 0.0;
  for (const auto& p : particles) {
    if (!(p.weight >= 0.0)) throw std::invalid_argument("belief: negative weight");
    total += p.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("belief: total weight must be positive");
  for (auto& p : particles) p.weight /= total;
  return BeliefState(std::move(particles));
}

}  // namespace cas
