#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cas/estimation.hpp"
#include "cas/optimizer.hpp"

namespace cas {

inline constexpr int kConfigSchemaVersion = 1;

struct PathsSpec {
  std::string model;            // encounter model JSON; empty means the built-in correlated model
  std::string table;            // ACXT table
  std::string proposal;         // importance-sampling proposal model
  std::string output_dir = "out";
  std::string initial_data;     // binned CSV for `fit`
  std::string transition_data;  // binned CSV for `fit`, optional
};

/// Grid axes as written in the config; rates in ft/min.
struct GridSpec {
  std::vector<double> h;
  std::vector<double> hdot0_fpm;
  std::vector<double> hdot1_fpm;
  int tau_max = 40;

  Grid build() const;
};
GridSpec default_grid_spec();

enum class EstimationMethod { MonteCarlo, Importance, CrossEntropy };

struct EvaluationSpec {
  std::uint64_t n = 1000;
  std::optional<std::uint64_t> seed;
  LogicKind own_logic = LogicKind::Table;
  LogicKind intruder_logic = LogicKind::None;
  PilotModel pilot;  // pilots flown in simulation
  EstimationMethod method = EstimationMethod::MonteCarlo;
  bool baseline = true;        // also run the unequipped case and report the risk ratio
  bool write_outcomes = false;
  std::uint64_t encounter_index = 0;  // used by `simulate`
  int ce_iterations = 3;
  std::uint64_t ce_samples = 2000;
  double ce_elite_fraction = 0.1;
  double ce_prior = 1.0;
};

struct FitSpec {
  std::string structure = "correlated";  // correlated | uncorrelated | path to a model file
  double prior = 1.0;
};

struct SampleSpec {
  std::uint64_t count = 10;
};

struct SliceSpec {
  double hdot0_fpm = 0.0;
  double hdot1_fpm = 0.0;
  Advisory a_prev = Advisory::COC;
  bool sense_labels = true;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  PathsSpec paths;
  GridSpec grid = default_grid_spec();
  RewardParams reward;
  PilotModel pilot;        // pilot assumed by the optimizer
  IntruderModel intruder;
  TcasConfig tcas;
  OnlineContext online;
  BeliefNoise belief;
  double separation_threshold = kNmacHorizontal;
  EvaluationSpec evaluation;
  FitSpec fit;
  SampleSpec sample;
  SliceSpec slice;

  /// Throws CodedError(E_CONFIG_INVALID) on out-of-range values.
  void validate() const;
};

/// Missing keys take defaults; unknown keys and bad values throw CodedError(E_CONFIG_INVALID).
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
/// Every field, defaults included.
nlohmann::json to_json(const RunConfig& cfg);
void write_config(std::ostream& out, const RunConfig& cfg);

std::string logic_name(LogicKind kind);
LogicKind logic_from_name(const std::string& name);

}  // namespace cas
