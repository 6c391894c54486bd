#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cas/advisory.hpp"
#include "cas/geometry.hpp"

namespace cas {

/// Uniformly sampled kinematic history of one aircraft.
struct AircraftTrack {
  double dt = 1.0;
  std::vector<AircraftState> states;

  std::size_t size() const { return states.size(); }
};

/// Per-step event flags.
enum EventFlag : std::uint8_t {
  kEventTA = 1u << 0,
  kEventRA = 1u << 1,          // an RA was issued (COC -> RA) at this step
  kEventStrengthen = 1u << 2,
  kEventReversal = 1u << 3,
  kEventCrossing = 1u << 4,    // altitude order changed while an RA was active
  kEventNMAC = 1u << 5,
};

struct EncounterTrace {
  double dt = 1.0;
  AircraftTrack ownship;
  AircraftTrack intruder;
  std::vector<Advisory> own_advisories;
  std::vector<Advisory> intruder_advisories;
  std::vector<std::uint8_t> events;

  std::size_t size() const { return ownship.size(); }
  bool any(EventFlag flag) const;
  /// Throws std::invalid_argument unless all series share one length and dt.
  void validate() const;
};

/// Assembles the logic state at `step` from the kinematics. A diverging pair maps to `tau_max`.
VerticalState vertical_state_of(const EncounterTrace& trace, std::size_t step, Advisory a_prev,
                                double separation_threshold, int tau_max);

/// Same assembly from a pair of states.
VerticalState vertical_state_of(const AircraftState& own, const AircraftState& intruder,
                                Advisory a_prev, double separation_threshold, int tau_max);

std::string format_events(std::uint8_t flags);
std::uint8_t parse_events(const std::string& text);

/// CSV with a `# dt=<seconds>` line followed by
/// `t,x0,y0,z0,vx0,vy0,vz0,x1,y1,z1,vx1,vy1,vz1,adv0,adv1,events`.
void write_trace_csv(std::ostream& out, const EncounterTrace& trace);
EncounterTrace read_trace_csv(std::istream& in);

}  // namespace cas
