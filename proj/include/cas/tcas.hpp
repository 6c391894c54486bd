#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cas/advisory.hpp"
#include "cas/dynamics.hpp"
#include "cas/geometry.hpp"

namespace cas {

inline constexpr double kFeetPerNauticalMile = 6076.12;

struct TcasConfig {
  double ta_tau = 40.0;                                        // s
  double ra_tau = 25.0;                                        // s
  double miss_distance_threshold = 1.2 * kFeetPerNauticalMile; // ft, horizontal
  double vertical_threshold = 800.0;  // ft, projected vertical miss gate
  double alim = 400.0;                // ft
  PilotModel pilot{1.0, kGravity / 4.0, 5.0};
  Sense tie_sense = Sense::Down;
  int hysteresis_steps = 2;

  void validate() const;
};

enum class ThreatLevel { None, TA, RA };

/// Constant-velocity closest point of approach.
struct ClosestApproach {
  double time = 0.0;              // s, negative when diverging
  double horizontal_miss = 0.0;   // ft
  double vertical_miss = 0.0;     // ft, |dz| at max(time, 0)
};

ClosestApproach closest_approach(const AircraftState& own, const AircraftState& intruder);

ThreatLevel assess_threat(const AircraftState& own, const AircraftState& intruder,
                          const TcasConfig& cfg);

/// Sense whose standard template (CL1500 / DES1500) leaves the larger separation on its own
/// side at closest approach.
Sense select_sense(const AircraftState& own, const AircraftState& intruder, const TcasConfig& cfg);

/// Weakest advisory of `sense` projected to reach ALIM at closest approach; the strongest one
/// if none does.
Advisory select_strength(const AircraftState& own, const AircraftState& intruder, Sense sense,
                         const TcasConfig& cfg);

/// Projected separation on the advisory's own side (positive means correctly separated).
double sense_separation(const AircraftState& own, const AircraftState& intruder, Advisory advisory,
                        const TcasConfig& cfg);

struct ThreatResolution {
  Advisory advisory = Advisory::COC;
  double time_to_cpa = 0.0;
};

/// Combines per-intruder RAs: a single RA stands; same-sense RAs yield the strongest;
/// mixed senses yield the RA of the most urgent intruder. Throws on an empty list.
Advisory arbitrate_multithreat(std::span<const ThreatResolution> per_intruder);

/// Stateful TCAS runner: re-selects every step and changes an issued RA only after the new
/// selection has differed for `hysteresis_steps` consecutive steps.
class TcasLogic {
 public:
  explicit TcasLogic(TcasConfig cfg);

  /// `forced_sense` comes from a coordination message.
  Advisory update(const AircraftState& own, std::span<const AircraftState> intruders,
                  std::optional<Sense> forced_sense = std::nullopt);

  Advisory current() const { return current_; }
  ThreatLevel last_threat() const { return last_threat_; }
  const TcasConfig& config() const { return cfg_; }

 private:
  TcasConfig cfg_;
  Advisory current_ = Advisory::COC;
  Advisory pending_ = Advisory::COC;
  int pending_count_ = 0;
  ThreatLevel last_threat_ = ThreatLevel::None;
};

}  // namespace cas
