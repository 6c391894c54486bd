#include "cas/qmdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cas {

void OnlineContext::validate(double collision_cost) const {
  if (!(cost_magnitude < collision_cost)) {
    throw std::invalid_argument("online context: cost magnitude must be below the collision cost");
  }
}

ActionValues interpolate(const LogicTable& table, const VerticalState& s) {
  const Grid& g = table.grid();
  const int tau = std::clamp(s.tau, 0, g.tau_max());
  const Bracket bh = bracket(g.h(), s.h);
  const Bracket b0 = bracket(g.hdot0(), s.hdot0);
  const Bracket b1 = bracket(g.hdot1(), s.hdot1);
  ActionValues result = ActionValues::Zero();
  for (int dh = 0; dh < 2; ++dh) {
    const double wh = dh ? bh.upper_weight : 1.0 - bh.upper_weight;
    if (wh == 0.0) continue;
    for (int d0 = 0; d0 < 2; ++d0) {
      const double w0 = d0 ? b0.upper_weight : 1.0 - b0.upper_weight;
      if (w0 == 0.0) continue;
      for (int d1 = 0; d1 < 2; ++d1) {
        const double w1 = d1 ? b1.upper_weight : 1.0 - b1.upper_weight;
        if (w1 == 0.0) continue;
        const std::size_t vertex =
            g.vertex_index(bh.lower + static_cast<std::size_t>(dh), b0.lower + static_cast<std::size_t>(d0),
                           b1.lower + static_cast<std::size_t>(d1));
        result += (wh * w0 * w1) * table.state_values(g.state_index(tau, s.a_prev, vertex));
      }
    }
  }
  return result;
}

ActionValues belief_action_values(const LogicTable& table, const BeliefState& belief) {
  double total = 0.0;
  for (const auto& p : belief.particles()) total += p.weight;
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("belief_action_values: belief is not normalized");
  }
  ActionValues result = ActionValues::Zero();
  for (const auto& p : belief.particles()) result += p.weight * interpolate(table, p.state);
  return result;
}

bool violates(CoordinationConstraint constraint, Advisory a) {
  switch (constraint) {
    case CoordinationConstraint::None: return false;
    case CoordinationConstraint::DoNotClimb: return sense_of(a) == Sense::Up;
    case CoordinationConstraint::DoNotDescend: return sense_of(a) == Sense::Down;
  }
  return false;
}

ActionValues apply_online_costs(ActionValues values, const OnlineContext& ctx) {
  const bool low = ctx.own_altitude_agl < ctx.inhibit_altitude;
  for (Advisory a : kAllAdvisories) {
    if (a == Advisory::COC) continue;
    if (low && sense_of(a) == Sense::Down) values(index_of(a)) += ctx.cost_magnitude;
    if (violates(ctx.constraint, a)) values(index_of(a)) += ctx.cost_magnitude;
  }
  return values;
}

Advisory select_action(const ActionValues& values, Advisory /*a_prev*/) {
  if (!values.allFinite()) throw std::invalid_argument("select_action: non-finite values");
  return argmax_advisory(values);
}

ActionValues fuse_multithreat(std::span<const ActionValues> per_intruder) {
  if (per_intruder.empty()) throw std::invalid_argument("fuse_multithreat: no intruders");
  ActionValues fused = per_intruder.front();
  for (const auto& v : per_intruder.subspan(1)) fused = fused.cwiseMin(v);
  return fused;
}

std::optional<CoordinationMessage> coordinate(Advisory leader_action, std::uint32_t own_id,
                                              std::uint32_t intruder_id) {
  if (own_id >= intruder_id) throw std::logic_error("coordinate: called on the follower");
  switch (sense_of(leader_action)) {
    case Sense::None: return std::nullopt;
    // the follower is told not to share the leader's sense
    case Sense::Down: return CoordinationMessage{CoordinationConstraint::DoNotDescend, own_id, intruder_id};
    case Sense::Up: return CoordinationMessage{CoordinationConstraint::DoNotClimb, own_id, intruder_id};
  }
  return std::nullopt;
}

BeliefState synthesize_belief(const VerticalState& truth, const BeliefNoise& noise, Rng& rng) {
  if (noise.particles < 1) throw std::invalid_argument("belief: need at least one particle");
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<BeliefState::Particle> particles;
  particles.reserve(static_cast<std::size_t>(noise.particles));
  const double w = 1.0 / noise.particles;
  for (int i = 0; i < noise.particles; ++i) {
    VerticalState s = truth;
    s.h += noise.sigma_h * unit(rng);
    s.hdot0 += noise.sigma_rate * unit(rng);
    s.hdot1 += noise.sigma_rate * unit(rng);
    particles.push_back({s, w});
  }
  return BeliefState::normalized(std::move(particles));
}

}  // namespace cas
