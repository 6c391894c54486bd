#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>

#include "cas/geometry.hpp"
#include "cas/logic_table.hpp"
#include "cas/random.hpp"

namespace cas {

enum class CoordinationConstraint : std::uint8_t { None, DoNotClimb, DoNotDescend };

struct OnlineContext {
  double own_altitude_agl = std::numeric_limits<double>::infinity();  // ft
  CoordinationConstraint constraint = CoordinationConstraint::None;
  double inhibit_altitude = 1000.0;  // ft, descend advisories inhibited below
  double cost_magnitude = -1e6;      // added to disallowed advisories

  /// cost_magnitude must dominate every table value, so it has to be below the collision cost.
  void validate(double collision_cost) const;
};

struct CoordinationMessage {
  CoordinationConstraint constraint = CoordinationConstraint::None;
  std::uint32_t leader_id = 0;
  std::uint32_t follower_id = 0;
};

/// Multilinear interpolation over (h, hdot0, hdot1) at the state's tau layer and previous
/// advisory. Off-grid states are clamped to the grid hull.
ActionValues interpolate(const LogicTable& table, const VerticalState& s);

/// Belief-weighted expected action values (QMDP).
ActionValues belief_action_values(const LogicTable& table, const BeliefState& belief);

/// Adds the cost magnitude to advisories that are inhibited at low altitude or incompatible
/// with a coordination constraint. COC is never penalized.
ActionValues apply_online_costs(ActionValues values, const OnlineContext& ctx);

/// Highest value with the policy tie-break order. `a_prev` does not influence the choice.
Advisory select_action(const ActionValues& values, Advisory a_prev = Advisory::COC);

/// Max-min utility fusion: elementwise minimum over intruders.
ActionValues fuse_multithreat(std::span<const ActionValues> per_intruder);

/// Message the leader (lower identifier) sends after choosing `leader_action`: the complement of
/// its sense, so a descending leader sends DoNotDescend and a climbing leader DoNotClimb.
/// Throws std::logic_error when called with `own_id` not below `intruder_id`.
std::optional<CoordinationMessage> coordinate(Advisory leader_action, std::uint32_t own_id,
                                              std::uint32_t intruder_id);

/// Advisories a coordination constraint forbids.
bool violates(CoordinationConstraint constraint, Advisory a);

/// Gaussian perturbations of the true state; equal-weight particles.
struct BeliefNoise {
  int particles = 20;
  double sigma_h = 25.0;     // ft
  double sigma_rate = 1.0;   // ft/s
};

BeliefState synthesize_belief(const VerticalState& truth, const BeliefNoise& noise, Rng& rng);

}  // namespace cas
