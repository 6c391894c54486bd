#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cas/bayes_net.hpp"
#include "cas/geometry.hpp"
#include "cas/random.hpp"

namespace cas {

enum class EncounterMode { Correlated, Uncorrelated };

/// Bin and continuous value per initial-network variable.
struct Assignment {
  std::vector<int> bins;
  std::vector<double> values;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Draw {
  Assignment assignment;
  double log_probability = 0.0;
};

/// Initial-state network plus a dynamic network. Dynamic nodes named `x'` give the next value
/// of initial variable `x`; unprimed dynamic nodes are the current values (evidence, roots).
///
/// Correlated variables (missing ones take defaults): altitude [ft], hdot0 and hdot1 [ft/min],
/// closure [ft/s], tau [s, time of horizontal closest approach], vmd [ft, intruder minus ownship
/// altitude at closest approach under the initial rates], hmd [ft, horizontal miss].
/// Uncorrelated variables describe one aircraft: altitude [ft], hdot [ft/min], speed [ft/s],
/// turn_rate [deg/s].
class EncounterModel {
 public:
  EncounterModel(DiscreteBayesNet initial_net, DiscreteBayesNet transition_net,
                 EncounterMode mode, double duration, double dt);

  const DiscreteBayesNet& initial_net() const { return initial_; }
  const DiscreteBayesNet& transition_net() const { return transition_; }
  EncounterMode mode() const { return mode_; }
  double duration() const { return duration_; }
  double dt() const { return dt_; }
  /// Number of commanded steps, duration / dt.
  int steps() const { return steps_; }
  bool fitted() const;

  /// For each transition node: initial-net variable it refers to.
  std::size_t transition_target(std::size_t node) const { return target_[node]; }
  bool transition_is_next(std::size_t node) const { return is_next_[node]; }

  /// Same structure and bins with new CPTs.
  EncounterModel with_nets(DiscreteBayesNet initial_net, DiscreteBayesNet transition_net) const;

 private:
  DiscreteBayesNet initial_;
  DiscreteBayesNet transition_;
  EncounterMode mode_;
  double duration_;
  double dt_;
  int steps_;
  std::vector<std::size_t> target_;
  std::vector<bool> is_next_;
};

/// Commanded motion for one step.
struct AircraftCommand {
  double vertical_rate = 0.0;  // ft/s
  double turn_rate = 0.0;      // rad/s
  double speed = 0.0;          // ft/s ground speed
};

struct SampledEncounter {
  EncounterMode mode = EncounterMode::Correlated;
  double dt = 1.0;
  /// One joint sequence (correlated) or ownship then intruder sequences (uncorrelated);
  /// each holds steps() assignments.
  std::vector<std::vector<Assignment>> trajectories;
  AircraftState own_initial;
  AircraftState intruder_initial;
  std::vector<AircraftCommand> own_commands;
  std::vector<AircraftCommand> intruder_commands;
  double log_probability = 0.0;

  std::size_t steps() const { return own_commands.size(); }
};

struct PlacementOptions {
  double tau_max = 40.0;                // s
  double separation_threshold = kNmacHorizontal;
  double max_miss_distance = kNmacHorizontal;
  int max_attempts = 100;
};

/// Ancestral sample from the initial network; values uniform within bins.
Draw sample_initial(const EncounterModel& model, Rng& rng);

/// One step of the dynamic network. A variable whose bin is unchanged keeps its value.
Draw sample_transition(const EncounterModel& model, const Assignment& current, Rng& rng);

/// Samples a complete encounter. Uncorrelated mode splits `rng` into ownship, intruder and
/// placement streams. Throws std::runtime_error if placement fails.
SampledEncounter build_encounter(const EncounterModel& model, Rng& rng,
                                 const PlacementOptions& placement = {});

/// Uncorrelated construction with explicit streams.
SampledEncounter build_uncorrelated(const EncounterModel& model, Rng& own_rng, Rng& intruder_rng,
                                    Rng& placement_rng, const PlacementOptions& placement = {});

/// Bin-level log-likelihood of every network draw in the encounter; -inf if any draw has
/// zero probability under `model`.
double trace_log_likelihood(const EncounterModel& model, const SampledEncounter& encounter);

/// Advances horizontal position under the commanded heading change and speed, and sets the
/// vertical rate to the command.
AircraftState nominal_step(const AircraftState& state, const AircraftCommand& command, double dt);

/// Rows of bin indices for refitting: initial rows and (current, next) transition rows.
struct EncounterData {
  std::vector<std::vector<int>> initial_rows;
  std::vector<std::vector<int>> transition_rows;
};
void append_data(const EncounterModel& model, const SampledEncounter& encounter, EncounterData& data);

/// Refits both networks from data using the structure of `model`.
EncounterModel fit_model(const EncounterModel& model, const EncounterData& data, double prior_count);

/// Conflict-forced correlated model used for vertical logic studies.
EncounterModel default_correlated_model();
/// Structure of default_correlated_model() without CPTs.
EncounterModel default_correlated_structure();
/// Uncorrelated single-aircraft model.
EncounterModel default_uncorrelated_model();
/// Head-on model where only `vmd` varies: bin 0 is [0, 100) ft (always an NMAC) with
/// probability `p_conflict`, bin 1 is [100, 50100) ft (never one).
EncounterModel toy_two_bin_model(double p_conflict);

void write_model_json(std::ostream& out, const EncounterModel& model);
EncounterModel read_model_json(std::istream& in);

}  // namespace cas
