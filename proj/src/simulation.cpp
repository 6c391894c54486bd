#include "cas/simulation.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace cas {

void Equipage::validate() const {
  if ((own.logic == LogicKind::Table || intruder.logic == LogicKind::Table) && !table) {
    throw std::invalid_argument("equipage: table logic requires a logic table");
  }
  own.pilot.validate();
  intruder.pilot.validate();
  if (own_id == intruder_id) throw std::invalid_argument("equipage: aircraft identifiers must differ");
}

namespace {

/// One aircraft's logic, pilot and kinematic state during a run.
struct Agent {
  const AircraftEquipage* equipage = nullptr;
  const std::vector<AircraftCommand>* commands = nullptr;
  std::optional<TcasLogic> tcas;
  AircraftState state;
  Advisory advisory = Advisory::COC;
  int delay_remaining = 0;
  bool maneuvering = false;  // vertical rate departs from the nominal command

  bool equipped() const { return equipage->logic != LogicKind::None; }
};

Advisory run_table_logic(const Agent& self, const Agent& other, const Equipage& eq,
                         CoordinationConstraint constraint, Rng& belief_rng) {
  const int tau_max = eq.table->grid().tau_max();
  const VerticalState truth =
      vertical_state_of(self.state, other.state, self.advisory, eq.separation_threshold, tau_max);
  // inside the horizontal volume the table is terminal; keep what is already issued
  if (truth.tau == 0 && self.advisory != Advisory::COC) return self.advisory;
  const BeliefState belief = synthesize_belief(truth, eq.belief, belief_rng);
  OnlineContext ctx = eq.online;
  ctx.own_altitude_agl = self.state.position.z();
  ctx.constraint = constraint;
  const ActionValues per_intruder[] = {belief_action_values(*eq.table, belief)};
  return select_action(apply_online_costs(fuse_multithreat(per_intruder), ctx), self.advisory);
}

Advisory run_logic(Agent& self, const Agent& other, const Equipage& eq,
                   CoordinationConstraint constraint, Rng& belief_rng) {
  switch (self.equipage->logic) {
    case LogicKind::None: return Advisory::COC;
    case LogicKind::Table: return run_table_logic(self, other, eq, constraint, belief_rng);
    case LogicKind::Tcas: {
      std::optional<Sense> forced;
      if (constraint == CoordinationConstraint::DoNotClimb) forced = Sense::Down;
      if (constraint == CoordinationConstraint::DoNotDescend) forced = Sense::Up;
      const AircraftState intruders[] = {other.state};
      return self.tcas->update(self.state, intruders, forced);
    }
  }
  return Advisory::COC;
}

std::uint8_t advisory_events(Advisory before, Advisory after) {
  std::uint8_t flags = 0;
  if (before == Advisory::COC && after != Advisory::COC) flags |= kEventRA;
  if (is_strengthening(before, after)) flags |= kEventStrengthen;
  if (is_reversal(before, after)) flags |= kEventReversal;
  return flags;
}

void issue(Agent& agent, Advisory advisory, Rng& pilot_rng) {
  if (advisory != agent.advisory && advisory != Advisory::COC) {
    agent.delay_remaining = sample_response_delay(agent.equipage->pilot, pilot_rng);
  }
  agent.advisory = advisory;
}

AircraftState advance(Agent& agent, std::size_t k, double dt) {
  const auto& commands = *agent.commands;
  const AircraftCommand& next_cmd = commands[std::min(k + 1, commands.size() - 1)];
  AircraftState next = nominal_step(agent.state, next_cmd, dt);
  const VerticalKinematics vertical{agent.state.position.z(), agent.state.velocity.z()};

  if (agent.advisory != Advisory::COC) {
    if (agent.delay_remaining > 0) {
      --agent.delay_remaining;
      if (!agent.maneuvering) return next;
      // a pilot that already left the nominal profile holds the current rate meanwhile
      next.position.z() = vertical.z + vertical.vz * dt;
      next.velocity.z() = vertical.vz;
      return next;
    }
    const auto moved = step_vertical(vertical, rate_band(agent.advisory), true, agent.equipage->pilot, dt);
    next.position.z() = moved.z;
    next.velocity.z() = moved.vz;
    agent.maneuvering = true;
    return next;
  }
  if (agent.maneuvering) {
    const double target = next_cmd.vertical_rate;
    const auto moved = step_vertical(vertical, RateBand{target, target}, true, agent.equipage->pilot, dt);
    next.position.z() = moved.z;
    next.velocity.z() = moved.vz;
    agent.maneuvering = moved.vz != target;
  }
  return next;
}

}  // namespace

EncounterTrace simulate_encounter(const SampledEncounter& encounter, const Equipage& eq,
                                  Rng& pilot_rng, Rng& belief_rng) {
  eq.validate();
  if (!(encounter.dt > 0.0) || encounter.own_commands.empty() ||
      encounter.own_commands.size() != encounter.intruder_commands.size()) {
    throw std::invalid_argument("simulate_encounter: inconsistent encounter commands");
  }
  if (eq.table && (eq.own.logic == LogicKind::Table || eq.intruder.logic == LogicKind::Table) &&
      encounter.dt != 1.0) {
    throw std::invalid_argument("simulate_encounter: dt mismatch with the 1 s logic table step");
  }
  const double dt = encounter.dt;
  const std::size_t steps = encounter.steps();

  Agent own{&eq.own, &encounter.own_commands, {}, encounter.own_initial};
  Agent intr{&eq.intruder, &encounter.intruder_commands, {}, encounter.intruder_initial};
  if (eq.own.logic == LogicKind::Tcas) own.tcas.emplace(eq.tcas);
  if (eq.intruder.logic == LogicKind::Tcas) intr.tcas.emplace(eq.tcas);
  const bool own_leads = eq.own_id < eq.intruder_id;
  Agent& leader = own_leads ? own : intr;
  Agent& follower = own_leads ? intr : own;
  const std::uint32_t leader_id = own_leads ? eq.own_id : eq.intruder_id;
  const std::uint32_t follower_id = own_leads ? eq.intruder_id : eq.own_id;

  EncounterTrace trace;
  trace.dt = dt;
  trace.ownship.dt = trace.intruder.dt = dt;
  bool any_ra_active = false;
  double previous_dz = 0.0;

  for (std::size_t k = 0; k <= steps; ++k) {
    std::uint8_t events = 0;
    const Advisory own_before = own.advisory;
    const Advisory intr_before = intr.advisory;

    CoordinationConstraint follower_constraint = CoordinationConstraint::None;
    if (leader.equipped()) {
      const Advisory chosen = run_logic(leader, follower, eq, CoordinationConstraint::None, belief_rng);
      if (follower.equipped()) {
        if (const auto msg = coordinate(chosen, leader_id, follower_id)) follower_constraint = msg->constraint;
      }
      issue(leader, chosen, pilot_rng);
    }
    if (follower.equipped()) {
      issue(follower, run_logic(follower, leader, eq, follower_constraint, belief_rng), pilot_rng);
    }
    for (const Agent* agent : {&own, &intr}) {
      if (agent->tcas && agent->tcas->last_threat() != ThreatLevel::None) events |= kEventTA;
    }
    events |= advisory_events(own_before, own.advisory);
    events |= advisory_events(intr_before, intr.advisory);

    const Eigen::Vector3d d = intr.state.position - own.state.position;
    const double dz = d.z();
    if (is_nmac(std::abs(dz), d.head<2>().norm())) events |= kEventNMAC;
    const bool ra_active = own.advisory != Advisory::COC || intr.advisory != Advisory::COC;
    if (k > 0 && (ra_active || any_ra_active) && dz * previous_dz < 0.0) events |= kEventCrossing;
    any_ra_active = ra_active;
    previous_dz = dz;

    trace.ownship.states.push_back(own.state);
    trace.intruder.states.push_back(intr.state);
    trace.own_advisories.push_back(own.advisory);
    trace.intruder_advisories.push_back(intr.advisory);
    trace.events.push_back(events);

    if (k == steps) break;
    const AircraftState own_next = advance(own, k, dt);
    const AircraftState intr_next = advance(intr, k, dt);
    own.state = own_next;
    intr.state = intr_next;
  }
  return trace;
}

EncounterTrace simulate_encounter(const SampledEncounter& encounter, const Equipage& eq,
                                  std::uint64_t seed) {
  Rng pilot_rng = make_stream(seed, Stream::Pilot, 0);
  Rng belief_rng = make_stream(seed, Stream::Belief, 0);
  return simulate_encounter(encounter, eq, pilot_rng, belief_rng);
}

EncounterTrace nominal_trace(const SampledEncounter& encounter) {
  Rng unused(0);
  return simulate_encounter(encounter, Equipage{}, unused, unused);
}

double min_scaled_separation(const EncounterTrace& trace) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const Eigen::Vector3d d = trace.intruder.states[k].position - trace.ownship.states[k].position;
    const double dz = d.z() / kNmacVertical;
    const double dxy = d.head<2>().norm() / kNmacHorizontal;
    best = std::min(best, std::sqrt(dz * dz + dxy * dxy));
  }
  return best;
}

}  // namespace cas
