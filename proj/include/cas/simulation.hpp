#pragma once

#include <cstdint>
#include <memory>

#include "cas/encounter_model.hpp"
#include "cas/logic_table.hpp"
#include "cas/qmdp.hpp"
#include "cas/tcas.hpp"
#include "cas/trace.hpp"

namespace cas {

enum class LogicKind : std::uint8_t { None, Tcas, Table };

struct AircraftEquipage {
  LogicKind logic = LogicKind::None;
  PilotModel pilot;
};

/// Collision avoidance fitted to each aircraft and the shared runtime settings.
struct Equipage {
  AircraftEquipage own;
  AircraftEquipage intruder;
  std::shared_ptr<const LogicTable> table;  // required by LogicKind::Table
  TcasConfig tcas;
  OnlineContext online;
  BeliefNoise belief;
  double separation_threshold = kNmacHorizontal;  // ft, defines tau
  std::uint32_t own_id = 1;
  std::uint32_t intruder_id = 2;

  /// Throws std::invalid_argument for a table logic without a table.
  void validate() const;
};

/// Closed-loop run: each equipped aircraft runs its logic every step; the lower identifier
/// leads coordination when both are equipped. Pilots respond after a geometric delay drawn
/// from `pilot_rng`; table logics perceive the state through particles drawn from `belief_rng`.
EncounterTrace simulate_encounter(const SampledEncounter& encounter, const Equipage& eq,
                                  Rng& pilot_rng, Rng& belief_rng);

/// Same, with pilot and belief streams derived from `seed`.
EncounterTrace simulate_encounter(const SampledEncounter& encounter, const Equipage& eq,
                                  std::uint64_t seed);

/// Trace of the encounter with nobody equipped.
EncounterTrace nominal_trace(const SampledEncounter& encounter);

/// Smallest value over the trace of sqrt((dz / 100)^2 + (dxy / 500)^2).
double min_scaled_separation(const EncounterTrace& trace);

}  // namespace cas
