// caslab: fit, sample, optimize, simulate, evaluate and slice from one run config.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "cas/config.hpp"
#include "cas/errors.hpp"
#include "cas/estimation.hpp"
#include "cas/optimizer.hpp"

namespace fs = std::filesystem;
using namespace cas;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  std::string table;
  std::string model;
};

std::ifstream open_input(const std::string& path, const char* code, const char* what) {
  if (path.empty()) throw CodedError(code, kExitMissingInput, std::string("no ") + what + " path configured");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CodedError(code, kExitMissingInput, std::string("cannot open ") + what + " " + path);
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CodedError("E_IO", kExitFailure, "cannot write " + path.string());
  return out;
}

template <typename Fn>
auto parse_file(const char* code, const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const CodedError&) {
    throw;
  } catch (const std::exception& e) {
    throw CodedError(code, kExitFailure, path + ": " + e.what());
  }
}

class Runner {
 public:
  Runner(RunConfig cfg, const Globals& g) : cfg_(std::move(cfg)), workers_(g.workers) {
    if (g.seed) cfg_.evaluation.seed = g.seed;
    if (!g.out.empty()) cfg_.paths.output_dir = g.out;
    if (!g.table.empty()) cfg_.paths.table = g.table;
    if (!g.model.empty()) cfg_.paths.model = g.model;
    out_dir_ = cfg_.paths.output_dir;
  }

  void prepare() {
    std::error_code ec;
    fs::create_directories(out_dir_, ec);
    if (ec) throw CodedError("E_IO", kExitFailure, "cannot create " + out_dir_.string());
    auto out = open_output(out_dir_ / "effective_config.json");
    write_config(out, cfg_);
  }

  void fit() {
    const EncounterModel templ = structure_template();
    auto read_rows = [&](const std::string& path, const DiscreteBayesNet& net) {
      auto in = open_input(path, "E_DATA_NOT_FOUND", "binned data");
      std::vector<std::string> names;
      for (const auto& node : net.nodes()) names.push_back(node.name);
      return parse_file("E_DATA_INVALID", path, [&] { return read_binned_csv(in, names); });
    };
    const auto initial_rows = read_rows(cfg_.paths.initial_data, templ.initial_net());
    DiscreteBayesNet initial = fit_cpts(templ.initial_net().structure(), initial_rows, cfg_.fit.prior);
    DiscreteBayesNet transition = templ.transition_net();
    if (!cfg_.paths.transition_data.empty()) {
      const auto rows = read_rows(cfg_.paths.transition_data, templ.transition_net());
      transition = fit_cpts(templ.transition_net().structure(), rows, cfg_.fit.prior);
    } else if (!transition.fitted()) {
      throw CodedError("E_DATA_NOT_FOUND", kExitMissingInput,
                       "structure has no transition CPTs and no transition data is configured");
    }
    const EncounterModel fitted = templ.with_nets(std::move(initial), std::move(transition));
    auto out = open_output(out_dir_ / "model.json");
    write_model_json(out, fitted);
  }

  void sample() {
    const auto seed = require_seed();
    const EncounterModel model = load_model();
    const fs::path dir = out_dir_ / "encounters";
    fs::create_directories(dir);
    EncounterData data;
    for (std::uint64_t i = 0; i < cfg_.sample.count; ++i) {
      Rng rng = make_stream(seed, Stream::Encounter, i);
      const SampledEncounter enc = build_encounter(model, rng, placement());
      append_data(model, enc, data);
      std::ostringstream name;
      name << "encounter_" << std::setw(5) << std::setfill('0') << i << ".csv";
      auto out = open_output(dir / name.str());
      write_trace_csv(out, nominal_trace(enc));
    }
    write_rows(out_dir_ / "initial_samples.csv", model.initial_net(), data.initial_rows);
    write_rows(out_dir_ / "transition_samples.csv", model.transition_net(), data.transition_rows);
  }

  void optimize() {
    const LogicTable table =
        backward_induction(cfg_.grid.build(), DynamicsModels{cfg_.pilot, cfg_.intruder}, cfg_.reward, workers_);
    auto out = open_output(out_dir_ / "table.acxt");
    write_table(out, table);
  }

  void simulate() {
    const auto seed = require_seed();
    const EncounterModel model = load_model();
    const Equipage eq = equipage(cfg_.evaluation.own_logic, cfg_.evaluation.intruder_logic);
    const auto index = cfg_.evaluation.encounter_index;
    Rng encounter_rng = make_stream(seed, Stream::Encounter, index);
    Rng pilot_rng = make_stream(seed, Stream::Pilot, index);
    Rng belief_rng = make_stream(seed, Stream::Belief, index);
    const SampledEncounter enc = build_encounter(model, encounter_rng, placement());
    const EncounterTrace trace = simulate_encounter(enc, eq, pilot_rng, belief_rng);
    auto out = open_output(out_dir_ / "trace.csv");
    write_trace_csv(out, trace);
  }

  void evaluate() {
    const auto seed = require_seed();
    const auto& spec = cfg_.evaluation;
    const EncounterModel nominal = load_model();
    const Equipage eq = equipage(spec.own_logic, spec.intruder_logic);
    const Equipage none = equipage(LogicKind::None, LogicKind::None);
    EvaluationOptions options{placement(), workers_};

    std::optional<EncounterModel> proposal;
    if (spec.method == EstimationMethod::Importance) {
      auto in = open_input(cfg_.paths.proposal, "E_PROPOSAL_NOT_FOUND", "proposal model");
      proposal = parse_file("E_MODEL_INVALID", cfg_.paths.proposal, [&] { return read_model_json(in); });
    } else if (spec.method == EstimationMethod::CrossEntropy) {
      EncounterModel start = nominal;
      if (!cfg_.paths.proposal.empty()) {
        auto in = open_input(cfg_.paths.proposal, "E_PROPOSAL_NOT_FOUND", "proposal model");
        start = parse_file("E_MODEL_INVALID", cfg_.paths.proposal, [&] { return read_model_json(in); });
      }
      CrossEntropyOptions ce{spec.ce_iterations, spec.ce_samples, spec.ce_elite_fraction, spec.ce_prior, options};
      // adaptation runs unequipped so the proposal targets the encounter geometry, not the logic
      proposal = cross_entropy_adapt(nominal, start, none, ce, seed ^ 0x9e3779b97f4a7c15ULL);
      auto out = open_output(out_dir_ / "proposal.json");
      write_model_json(out, *proposal);
    }

    auto run = [&](const Equipage& e, std::vector<EncounterOutcome>* outcomes) {
      if (proposal) return is_estimate(nominal, *proposal, e, spec.n, seed, options, outcomes);
      return estimate_metrics(nominal, e, spec.n, seed, options, outcomes);
    };
    std::vector<EncounterOutcome> outcomes;
    const MetricsReport equipped = run(eq, spec.write_outcomes ? &outcomes : nullptr);
    std::optional<MetricsReport> baseline;
    if (spec.baseline) baseline = run(none, nullptr);

    {
      auto out = open_output(out_dir_ / "metrics.txt");
      out << "own_logic: " << logic_name(spec.own_logic) << '\n'
          << "intruder_logic: " << logic_name(spec.intruder_logic) << '\n'
          << "[equipped]\n";
      write_report(out, equipped);
      if (baseline) {
        out << "[unequipped]\n";
        write_report(out, *baseline);
        if (baseline->p_nmac > 0.0) {
          const RiskRatio rr = risk_ratio(equipped, *baseline);
          out << std::setprecision(17) << "risk_ratio: " << rr.ratio << '\n'
              << "risk_ratio_se: " << rr.standard_error << '\n';
        } else {
          out << "risk_ratio: unavailable\n";
        }
      }
    }
    if (spec.write_outcomes) {
      auto out = open_output(out_dir_ / "outcomes.csv");
      write_outcomes_csv(out, outcomes);
    }
    if (baseline && !(baseline->p_nmac > 0.0)) {
      throw CodedError("E_INSUFFICIENT_UNEQUIPPED_NMAC", kExitFailure,
                       "no NMAC in the unequipped run; risk ratio undefined");
    }
  }

  void slice() {
    const auto table = load_table();
    const PolicySlice s = policy_slice(*table, cfg_.slice.hdot0_fpm * kFeetPerMinute,
                                       cfg_.slice.hdot1_fpm * kFeetPerMinute, cfg_.slice.a_prev);
    auto out = open_output(out_dir_ / "slice.csv");
    write_slice_csv(out, s, cfg_.slice.sense_labels);
  }

 private:
  std::uint64_t require_seed() const {
    if (!cfg_.evaluation.seed) {
      throw CodedError("E_SEED_REQUIRED", kExitBadConfig, "stochastic command needs --seed or evaluation.seed");
    }
    return *cfg_.evaluation.seed;
  }

  PlacementOptions placement() const {
    PlacementOptions p;
    p.tau_max = cfg_.grid.tau_max;
    p.separation_threshold = cfg_.separation_threshold;
    return p;
  }

  EncounterModel structure_template() const {
    const auto& s = cfg_.fit.structure;
    if (s == "correlated") return default_correlated_model();
    if (s == "uncorrelated") return default_uncorrelated_model();
    auto in = open_input(s, "E_MODEL_NOT_FOUND", "structure model");
    return parse_file("E_MODEL_INVALID", s, [&] { return read_model_json(in); });
  }

  EncounterModel load_model() const {
    if (cfg_.paths.model.empty()) return default_correlated_model();
    auto in = open_input(cfg_.paths.model, "E_MODEL_NOT_FOUND", "encounter model");
    EncounterModel model = parse_file("E_MODEL_INVALID", cfg_.paths.model, [&] { return read_model_json(in); });
    if (!model.fitted()) throw CodedError("E_MODEL_INVALID", kExitFailure, "encounter model has no CPTs");
    return model;
  }

  std::shared_ptr<const LogicTable> load_table() const {
    auto in = open_input(cfg_.paths.table, "E_TABLE_NOT_FOUND", "logic table");
    return parse_file("E_TABLE_INVALID", cfg_.paths.table,
                      [&] { return std::make_shared<const LogicTable>(read_table(in)); });
  }

  Equipage equipage(LogicKind own, LogicKind intruder) const {
    Equipage eq;
    eq.own = {own, cfg_.evaluation.pilot};
    eq.intruder = {intruder, cfg_.evaluation.pilot};
    eq.tcas = cfg_.tcas;
    eq.online = cfg_.online;
    eq.belief = cfg_.belief;
    eq.separation_threshold = cfg_.separation_threshold;
    if (own == LogicKind::Table || intruder == LogicKind::Table) eq.table = load_table();
    return eq;
  }

  void write_rows(const fs::path& path, const DiscreteBayesNet& net, const std::vector<std::vector<int>>& rows) {
    std::vector<std::string> names;
    for (const auto& node : net.nodes()) names.push_back(node.name);
    auto out = open_output(path);
    write_binned_csv(out, names, rows);
  }

  RunConfig cfg_;
  unsigned workers_;
  fs::path out_dir_;
};

RunConfig initial_config(const Globals& g) {
  if (g.config_path.empty()) {
    RunConfig cfg;
    cfg.validate();
    return cfg;
  }
  return load_config(g.config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Airborne collision avoidance lab"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Run config (JSON)");
  app.add_option("--seed", g.seed, "Root seed for stochastic commands");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--table", g.table, "Logic table path (overrides the config)");
  app.add_option("--model", g.model, "Encounter model path (overrides the config)");

  using Step = void (Runner::*)();
  const std::pair<const char*, Step> commands[] = {
      {"fit", &Runner::fit},           {"sample", &Runner::sample},     {"optimize", &Runner::optimize},
      {"simulate", &Runner::simulate}, {"evaluate", &Runner::evaluate}, {"slice", &Runner::slice},
  };
  const char* descriptions[] = {
      "Fit an encounter model from binned samples", "Sample encounters and write nominal traces",
      "Solve the logic table",                      "Simulate one encounter",
      "Estimate safety metrics",                    "Export a policy slice",
  };
  std::optional<Step> chosen;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, descriptions[i]);
    sub->fallthrough();
    sub->callback([&chosen, step = commands[i].second] { chosen = step; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "E_USAGE: " << e.what() << '\n';
    return kExitBadConfig;
  }

  try {
    Runner runner(initial_config(g), g);
    runner.prepare();
    (runner.*(*chosen))();
  } catch (const CodedError& e) {
    std::cerr << e.code() << ": " << e.what() << '\n';
    return e.exit_status();
  } catch (const std::invalid_argument& e) {
    std::cerr << "E_INVALID_ARGUMENT: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "E_INTERNAL: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
