#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cas/encounter_model.hpp"
#include "cas/simulation.hpp"

namespace cas {

/// Per-encounter result of a closed-loop run.
struct EncounterOutcome {
  std::uint64_t index = 0;
  double weight = 1.0;  // likelihood ratio, 1 for plain Monte Carlo
  bool nmac = false;
  bool alert = false;
  bool strengthen = false;
  bool reversal = false;
  bool crossing = false;
  double min_separation = 0.0;  // scaled, see min_scaled_separation
};

struct MetricsReport {
  std::uint64_t n = 0;
  double p_nmac = 0.0;
  double p_nmac_se = 0.0;
  double alert_rate = 0.0;
  double strengthen_rate = 0.0;
  double reversal_rate = 0.0;
  double crossing_rate = 0.0;
  double effective_sample_size = 0.0;
  std::uint64_t nmac_count = 0;         // unweighted
  std::uint64_t support_violations = 0; // NMACs the nominal model cannot produce
};

struct EvaluationOptions {
  PlacementOptions placement;
  unsigned workers = 1;
};

EncounterOutcome summarize_trace(const EncounterTrace& trace);

/// Runs encounter `index` with streams derived from `seed`. Identical (seed, index) pairs give
/// identical encounters whatever the equipage.
EncounterOutcome run_encounter(const EncounterModel& model, const Equipage& eq, std::uint64_t seed,
                               std::uint64_t index, const PlacementOptions& placement = {});

/// Aggregates in index order. p_nmac = sum(w * nmac) / n with SE sqrt((mean(x^2) - p^2) / n);
/// secondary rates are self-normalized so they stay in [0, 1].
MetricsReport summarize(const std::vector<EncounterOutcome>& outcomes);

/// Plain Monte Carlo over encounters 0..n-1. Throws std::invalid_argument for n = 0.
MetricsReport estimate_metrics(const EncounterModel& model, const Equipage& eq, std::uint64_t n,
                               std::uint64_t seed, const EvaluationOptions& options = {},
                               std::vector<EncounterOutcome>* outcomes = nullptr);

struct RiskRatio {
  double ratio = 0.0;
  double standard_error = 0.0;
};

/// equipped / unequipped with a delta-method standard error.
/// Throws std::domain_error when the unequipped run saw no NMAC.
RiskRatio risk_ratio(const MetricsReport& equipped, const MetricsReport& unequipped);

/// Throws std::invalid_argument unless the two models share networks, bins and timing.
void require_same_structure(const EncounterModel& a, const EncounterModel& b);

/// Samples from `proposal` and reweights by the nominal likelihood ratio.
MetricsReport is_estimate(const EncounterModel& nominal, const EncounterModel& proposal,
                          const Equipage& eq, std::uint64_t n, std::uint64_t seed,
                          const EvaluationOptions& options = {},
                          std::vector<EncounterOutcome>* outcomes = nullptr);

struct CrossEntropyOptions {
  int iterations = 3;
  std::uint64_t samples_per_iteration = 2000;
  double elite_fraction = 0.1;
  double prior_count = 1.0;
  EvaluationOptions evaluation;
};

/// Orders outcomes by severity: NMACs first by descending weight, then ascending separation.
std::vector<std::size_t> severity_order(const std::vector<EncounterOutcome>& outcomes);

/// Refits the proposal on the most severe encounters each iteration.
/// Throws std::invalid_argument if the elite set would be empty.
EncounterModel cross_entropy_adapt(const EncounterModel& nominal, const EncounterModel& proposal,
                                   const Equipage& eq, const CrossEntropyOptions& options,
                                   std::uint64_t seed);

/// Plain-text `key: value` report.
void write_report(std::ostream& out, const MetricsReport& report);
/// One line per encounter: index,weight,nmac,alert,strengthen,reversal,crossing,min_separation.
void write_outcomes_csv(std::ostream& out, const std::vector<EncounterOutcome>& outcomes);

}  // namespace cas
