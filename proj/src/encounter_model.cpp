#include "cas/encounter_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "cas/advisory.hpp"

namespace cas {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool same_edges(const BayesNode& a, const BayesNode& b) { return a.edges == b.edges; }

/// Resolves variable positions once per encounter instead of per step.
struct VariableIndex {
  explicit VariableIndex(const DiscreteBayesNet& net, const char* name) : index(net.find(name)) {}
  double get(const Assignment& a, double fallback) const {
    return index ? a.values[*index] : fallback;
  }
  std::optional<std::size_t> index;
};

double log_of(double p) { return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity(); }

}  // namespace

EncounterModel::EncounterModel(DiscreteBayesNet initial_net, DiscreteBayesNet transition_net,
                               EncounterMode mode, double duration, double dt)
    : initial_(std::move(initial_net)),
      transition_(std::move(transition_net)),
      mode_(mode),
      duration_(duration),
      dt_(dt) {
  if (initial_.size() == 0) throw std::invalid_argument("encounter model: empty initial network");
  if (!(dt_ > 0.0) || !(duration_ > 0.0)) {
    throw std::invalid_argument("encounter model: duration and dt must be positive");
  }
  const double ratio = duration_ / dt_;
  steps_ = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - steps_) > 1e-9 || steps_ < 1) {
    throw std::invalid_argument("encounter model: duration must be a whole number of steps");
  }
  target_.resize(transition_.size());
  is_next_.resize(transition_.size());
  std::vector<bool> has_next(initial_.size(), false);
  for (std::size_t j = 0; j < transition_.size(); ++j) {
    const auto& node = transition_.node(j);
    const bool next = !node.name.empty() && node.name.back() == '\'';
    const std::string base = next ? node.name.substr(0, node.name.size() - 1) : node.name;
    const auto target = initial_.find(base);
    if (!target) {
      throw std::invalid_argument("encounter model: dynamic node '" + node.name +
                                  "' does not mirror an initial variable");
    }
    if (!same_edges(node, initial_.node(*target))) {
      throw std::invalid_argument("encounter model: dynamic node '" + node.name +
                                  "' bins differ from the initial variable");
    }
    if (!next && !node.parents.empty()) {
      throw std::invalid_argument("encounter model: current-time node '" + node.name +
                                  "' must be a root");
    }
    if (next) {
      if (has_next[*target]) throw std::invalid_argument("encounter model: duplicate " + node.name);
      has_next[*target] = true;
    }
    target_[j] = *target;
    is_next_[j] = next;
  }
}

bool EncounterModel::fitted() const {
  return initial_.fitted() && (transition_.size() == 0 || transition_.fitted());
}

EncounterModel EncounterModel::with_nets(DiscreteBayesNet initial_net,
                                         DiscreteBayesNet transition_net) const {
  return EncounterModel(std::move(initial_net), std::move(transition_net), mode_, duration_, dt_);
}

Draw sample_initial(const EncounterModel& model, Rng& rng) {
  const auto& net = model.initial_net();
  net.require_fitted();
  Draw draw;
  draw.assignment.bins.assign(net.size(), 0);
  draw.assignment.values.assign(net.size(), 0.0);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto [bin, lp] = sample_bin(net, i, draw.assignment.bins, rng);
    draw.assignment.bins[i] = bin;
    draw.assignment.values[i] = sample_in_bin(net.node(i), bin, rng);
    draw.log_probability += lp;
  }
  return draw;
}

Draw sample_transition(const EncounterModel& model, const Assignment& current, Rng& rng) {
  const auto& net = model.transition_net();
  if (current.bins.size() != model.initial_net().size()) {
    throw std::invalid_argument("sample_transition: assignment does not match model");
  }
  Draw draw{current, 0.0};
  if (net.size() == 0) return draw;
  net.require_fitted();
  std::vector<int> bins(net.size(), 0);
  for (std::size_t j = 0; j < net.size(); ++j) {
    const std::size_t target = model.transition_target(j);
    if (!model.transition_is_next(j)) {
      bins[j] = current.bins[target];
      continue;
    }
    const auto [bin, lp] = sample_bin(net, j, bins, rng);
    bins[j] = bin;
    draw.log_probability += lp;
    if (bin != current.bins[target]) {
      draw.assignment.bins[target] = bin;
      draw.assignment.values[target] = sample_in_bin(model.initial_net().node(target), bin, rng);
    }
  }
  return draw;
}

namespace {

std::vector<Assignment> sample_sequence(const EncounterModel& model, Rng& rng, double& log_probability) {
  std::vector<Assignment> sequence;
  sequence.reserve(static_cast<std::size_t>(model.steps()));
  auto first = sample_initial(model, rng);
  log_probability += first.log_probability;
  sequence.push_back(std::move(first.assignment));
  for (int k = 1; k < model.steps(); ++k) {
    auto next = sample_transition(model, sequence.back(), rng);
    log_probability += next.log_probability;
    sequence.push_back(std::move(next.assignment));
  }
  return sequence;
}

SampledEncounter build_correlated(const EncounterModel& model, Rng& rng) {
  SampledEncounter enc;
  enc.mode = EncounterMode::Correlated;
  enc.dt = model.dt();
  enc.trajectories.push_back(sample_sequence(model, rng, enc.log_probability));
  const auto& seq = enc.trajectories.front();
  const auto& net = model.initial_net();

  const VariableIndex altitude(net, "altitude"), hdot0(net, "hdot0"), hdot1(net, "hdot1"),
      closure(net, "closure"), tau(net, "tau"), vmd(net, "vmd"), hmd(net, "hmd");
  const Assignment& first = seq.front();
  const double closure_speed = closure.get(first, 300.0);
  const double t_cpa = tau.get(first, 30.0);
  const double half = 0.5 * closure_speed;

  for (const auto& a : seq) {
    enc.own_commands.push_back({hdot0.get(a, 0.0) * kFeetPerMinute, 0.0, half});
    enc.intruder_commands.push_back({hdot1.get(a, 0.0) * kFeetPerMinute, 0.0, half});
  }
  const double vz0 = enc.own_commands.front().vertical_rate;
  const double vz1 = enc.intruder_commands.front().vertical_rate;
  const double z0 = altitude.get(first, 5000.0);

  enc.own_initial.position = {0.0, 0.0, z0};
  enc.own_initial.velocity = {half, 0.0, vz0};
  enc.intruder_initial.position = {closure_speed * t_cpa, hmd.get(first, 0.0),
                                   z0 + vmd.get(first, 0.0) - (vz1 - vz0) * t_cpa};
  enc.intruder_initial.velocity = {-half, 0.0, vz1};
  return enc;
}

std::vector<AircraftCommand> single_aircraft_commands(const EncounterModel& model,
                                                      const std::vector<Assignment>& seq) {
  const auto& net = model.initial_net();
  const VariableIndex hdot(net, "hdot"), speed(net, "speed"), turn(net, "turn_rate");
  std::vector<AircraftCommand> commands;
  commands.reserve(seq.size());
  for (const auto& a : seq) {
    commands.push_back({hdot.get(a, 0.0) * kFeetPerMinute, turn.get(a, 0.0) * kDegToRad,
                        speed.get(a, 200.0)});
  }
  return commands;
}

std::vector<AircraftState> nominal_path(AircraftState state, const std::vector<AircraftCommand>& commands,
                                        double dt) {
  std::vector<AircraftState> path{state};
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const auto& next_cmd = commands[std::min(k + 1, commands.size() - 1)];
    state = nominal_step(state, next_cmd, dt);
    path.push_back(state);
  }
  return path;
}

}  // namespace

AircraftState nominal_step(const AircraftState& state, const AircraftCommand& command, double dt) {
  AircraftState next = state;
  next.position += state.velocity * dt;
  const double heading = std::atan2(state.velocity.y(), state.velocity.x()) + command.turn_rate * dt;
  next.velocity = {command.speed * std::cos(heading), command.speed * std::sin(heading),
                   command.vertical_rate};
  return next;
}

SampledEncounter build_uncorrelated(const EncounterModel& model, Rng& own_rng, Rng& intruder_rng,
                                    Rng& placement_rng, const PlacementOptions& placement) {
  if (model.mode() != EncounterMode::Uncorrelated) {
    throw std::invalid_argument("build_uncorrelated: model is correlated");
  }
  SampledEncounter enc;
  enc.mode = EncounterMode::Uncorrelated;
  enc.dt = model.dt();
  enc.trajectories.push_back(sample_sequence(model, own_rng, enc.log_probability));
  enc.trajectories.push_back(sample_sequence(model, intruder_rng, enc.log_probability));
  enc.own_commands = single_aircraft_commands(model, enc.trajectories[0]);
  enc.intruder_commands = single_aircraft_commands(model, enc.trajectories[1]);

  const VariableIndex altitude(model.initial_net(), "altitude");
  const auto& own_cmd = enc.own_commands.front();
  const auto& intr_cmd = enc.intruder_commands.front();
  enc.own_initial.position = {0.0, 0.0, altitude.get(enc.trajectories[0].front(), 5000.0)};
  enc.own_initial.velocity = {own_cmd.speed, 0.0, own_cmd.vertical_rate};
  const auto own_path = nominal_path(enc.own_initial, enc.own_commands, enc.dt);

  const int steps = model.steps();
  for (int attempt = 0; attempt < placement.max_attempts; ++attempt) {
    const double heading = 2.0 * std::numbers::pi * uniform01(placement_rng);
    const double t_star = model.duration() * uniform01(placement_rng);
    const double miss = placement.max_miss_distance * uniform01(placement_rng);
    const double side = uniform01(placement_rng) < 0.5 ? -1.0 : 1.0;

    AircraftState intr;
    intr.position = {0.0, 0.0, altitude.get(enc.trajectories[1].front(), 5000.0)};
    intr.velocity = {intr_cmd.speed * std::cos(heading), intr_cmd.speed * std::sin(heading),
                     intr_cmd.vertical_rate};
    const auto intr_path = nominal_path(intr, enc.intruder_commands, enc.dt);

    const auto k_star = static_cast<std::size_t>(std::lround(t_star / enc.dt));
    const Eigen::Vector2d rel = (intr_path[k_star].position - own_path[k_star].position).head<2>();
    const Eigen::Vector2d rel_v = (intr_path[k_star].velocity - own_path[k_star].velocity).head<2>();
    if (rel_v.norm() < 1e-9) continue;
    const Eigen::Vector2d normal = side * Eigen::Vector2d(-rel_v.y(), rel_v.x()).normalized();
    const Eigen::Vector2d offset = miss * normal - rel;

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    bool within_horizon = false;
    for (std::size_t k = 0; k <= static_cast<std::size_t>(steps); ++k) {
      const Eigen::Vector2d p = (intr_path[k].position - own_path[k].position).head<2>() + offset;
      const Eigen::Vector2d v = (intr_path[k].velocity - own_path[k].velocity).head<2>();
      const double r = p.norm();
      if (r < best - 1e-9) {
        best = r;
        best_k = k;
      }
      const auto tau = horizontal_tau(p, v, placement.separation_threshold);
      within_horizon = within_horizon || (tau && *tau <= placement.tau_max);
    }
    if (best_k != k_star || !within_horizon) continue;

    intr.position.head<2>() += offset;
    enc.intruder_initial = intr;
    return enc;
  }
  throw std::runtime_error("build_encounter: placement failed after bounded retries");
}

SampledEncounter build_encounter(const EncounterModel& model, Rng& rng,
                                 const PlacementOptions& placement) {
  if (!model.fitted()) throw std::invalid_argument("build_encounter: model is not fitted");
  if (model.mode() == EncounterMode::Correlated) return build_correlated(model, rng);
  Rng own_rng(rng());
  Rng intruder_rng(rng());
  Rng placement_rng(rng());
  return build_uncorrelated(model, own_rng, intruder_rng, placement_rng, placement);
}

double trace_log_likelihood(const EncounterModel& model, const SampledEncounter& encounter) {
  const auto& init = model.initial_net();
  const auto& dyn = model.transition_net();
  init.require_fitted();
  const std::size_t expected = model.mode() == EncounterMode::Correlated ? 1 : 2;
  if (encounter.trajectories.size() != expected) {
    throw std::invalid_argument("trace_log_likelihood: trajectory count does not match mode");
  }
  double total = 0.0;
  std::vector<int> bins(dyn.size(), 0);
  for (const auto& seq : encounter.trajectories) {
    if (seq.size() != static_cast<std::size_t>(model.steps())) {
      throw std::invalid_argument("trace_log_likelihood: sequence length does not match model");
    }
    for (const auto& a : seq) {
      if (a.bins.size() != init.size()) {
        throw std::invalid_argument("trace_log_likelihood: assignment does not match model");
      }
    }
    for (std::size_t i = 0; i < init.size(); ++i) total += log_of(init.probability(i, seq.front().bins));
    if (dyn.size() == 0) continue;
    for (std::size_t k = 1; k < seq.size(); ++k) {
      for (std::size_t j = 0; j < dyn.size(); ++j) {
        const std::size_t t = model.transition_target(j);
        bins[j] = model.transition_is_next(j) ? seq[k].bins[t] : seq[k - 1].bins[t];
      }
      for (std::size_t j = 0; j < dyn.size(); ++j) {
        if (model.transition_is_next(j)) total += log_of(dyn.probability(j, bins));
      }
    }
  }
  return total;
}

void append_data(const EncounterModel& model, const SampledEncounter& encounter, EncounterData& data) {
  const auto& dyn = model.transition_net();
  for (const auto& seq : encounter.trajectories) {
    data.initial_rows.push_back(seq.front().bins);
    if (dyn.size() == 0) continue;
    for (std::size_t k = 1; k < seq.size(); ++k) {
      std::vector<int> row(dyn.size());
      for (std::size_t j = 0; j < dyn.size(); ++j) {
        const std::size_t t = model.transition_target(j);
        row[j] = model.transition_is_next(j) ? seq[k].bins[t] : seq[k - 1].bins[t];
      }
      data.transition_rows.push_back(std::move(row));
    }
  }
}

EncounterModel fit_model(const EncounterModel& model, const EncounterData& data, double prior_count) {
  auto initial = fit_cpts(model.initial_net().structure(), data.initial_rows, prior_count);
  auto transition = model.transition_net().size() == 0
                        ? model.transition_net()
                        : fit_cpts(model.transition_net().structure(), data.transition_rows, prior_count);
  return model.with_nets(std::move(initial), std::move(transition));
}

// ---------------------------------------------------------------------------
// Built-in models

namespace {

using Row = std::vector<double>;

std::vector<Row> uniform_rows(std::size_t rows, std::size_t bins) {
  return std::vector<Row>(rows, Row(bins, 1.0 / static_cast<double>(bins)));
}

/// Stay in the current bin with `stay`, otherwise move to a neighbour (split evenly).
std::vector<Row> sticky_rows(std::size_t bins, double stay) {
  std::vector<Row> rows(bins, Row(bins, 0.0));
  for (std::size_t b = 0; b < bins; ++b) {
    const bool left = b > 0;
    const bool right = b + 1 < bins;
    const double move = (left || right) ? 1.0 - stay : 0.0;
    rows[b][b] = 1.0 - move;
    if (left) rows[b][b - 1] = move / (left && right ? 2.0 : 1.0);
    if (right) rows[b][b + 1] = move / (left && right ? 2.0 : 1.0);
  }
  return rows;
}

const std::vector<double> kAltitudeEdges = {1000, 3000, 6000, 10000, 18000};
const std::vector<double> kRateEdges = {-2000, -1000, -400, 400, 1000, 2000};  // ft/min

DiscreteBayesNet correlated_initial(bool with_cpts) {
  std::vector<BayesNode> nodes = {
      {"altitude", {}, kAltitudeEdges, {{0.2, 0.3, 0.3, 0.2}}},
      {"hdot0", {0}, kRateEdges,
       {{0.05, 0.15, 0.6, 0.15, 0.05},
        {0.08, 0.17, 0.5, 0.17, 0.08},
        {0.1, 0.2, 0.4, 0.2, 0.1},
        {0.1, 0.2, 0.4, 0.2, 0.1}}},
      {"hdot1", {0}, kRateEdges,
       {{0.05, 0.15, 0.6, 0.15, 0.05},
        {0.08, 0.17, 0.5, 0.17, 0.08},
        {0.1, 0.2, 0.4, 0.2, 0.1},
        {0.1, 0.2, 0.4, 0.2, 0.1}}},
      {"closure", {0}, {200, 350, 500, 700},
       {{0.6, 0.3, 0.1}, {0.4, 0.4, 0.2}, {0.3, 0.4, 0.3}, {0.2, 0.4, 0.4}}},
      {"tau", {}, {25, 35, 45}, {{0.5, 0.5}}},
      {"vmd", {}, {-100, -50, 0, 50, 100}, {{0.25, 0.25, 0.25, 0.25}}},
      {"hmd", {}, {0, 250, 500}, {{0.5, 0.5}}},
  };
  if (!with_cpts) {
    for (auto& n : nodes) n.cpt.clear();
  }
  return DiscreteBayesNet(std::move(nodes));
}

DiscreteBayesNet correlated_transition(bool with_cpts) {
  const std::size_t bins = kRateEdges.size() - 1;
  std::vector<BayesNode> nodes = {
      {"hdot0", {}, kRateEdges, uniform_rows(1, bins)},
      {"hdot1", {}, kRateEdges, uniform_rows(1, bins)},
      {"hdot0'", {0}, kRateEdges, sticky_rows(bins, 0.99)},
      {"hdot1'", {1}, kRateEdges, sticky_rows(bins, 0.99)},
  };
  if (!with_cpts) {
    for (auto& n : nodes) n.cpt.clear();
  }
  return DiscreteBayesNet(std::move(nodes));
}

}  // namespace

EncounterModel default_correlated_model() {
  return EncounterModel(correlated_initial(true), correlated_transition(true),
                        EncounterMode::Correlated, 60.0, 1.0);
}

EncounterModel default_correlated_structure() {
  return EncounterModel(correlated_initial(false), correlated_transition(false),
                        EncounterMode::Correlated, 60.0, 1.0);
}

EncounterModel default_uncorrelated_model() {
  const std::size_t rate_bins = kRateEdges.size() - 1;
  DiscreteBayesNet initial({
      {"altitude", {}, {4800, 5000, 5200}, {{0.5, 0.5}}},
      {"speed", {0}, {100, 200, 300}, {{0.5, 0.5}, {0.4, 0.6}}},
      {"hdot", {0}, kRateEdges, {{0.1, 0.2, 0.4, 0.2, 0.1}, {0.1, 0.2, 0.4, 0.2, 0.1}}},
      {"turn_rate", {}, {-3, -1, 1, 3}, {{0.15, 0.7, 0.15}}},
  });
  DiscreteBayesNet transition({
      {"hdot", {}, kRateEdges, uniform_rows(1, rate_bins)},
      {"turn_rate", {}, {-3, -1, 1, 3}, uniform_rows(1, 3)},
      {"hdot'", {0}, kRateEdges, sticky_rows(rate_bins, 0.98)},
      {"turn_rate'", {1}, {-3, -1, 1, 3}, sticky_rows(3, 0.95)},
  });
  return EncounterModel(std::move(initial), std::move(transition), EncounterMode::Uncorrelated,
                        60.0, 1.0);
}

EncounterModel toy_two_bin_model(double p_conflict) {
  if (!(p_conflict >= 0.0 && p_conflict <= 1.0)) {
    throw std::invalid_argument("toy model: probability outside [0, 1]");
  }
  DiscreteBayesNet initial({
      {"altitude", {}, {5000, 5000.001}, {{1.0}}},
      {"hdot0", {}, {0, 1e-9}, {{1.0}}},
      {"hdot1", {}, {0, 1e-9}, {{1.0}}},
      {"closure", {}, {300, 300.001}, {{1.0}}},
      {"tau", {}, {30, 31}, {{1.0}}},
      {"vmd", {}, {0, 100, 50100}, {{p_conflict, 1.0 - p_conflict}}},
      {"hmd", {}, {0, 1e-6}, {{1.0}}},
  });
  return EncounterModel(std::move(initial), DiscreteBayesNet{}, EncounterMode::Correlated, 60.0, 1.0);
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

using nlohmann::json;

constexpr const char* kModelFormat = "cas.encounter_model";
constexpr int kModelVersion = 1;

json net_to_json(const DiscreteBayesNet& net) {
  json nodes = json::array();
  for (const auto& n : net.nodes()) {
    json parents = json::array();
    for (std::size_t p : n.parents) parents.push_back(net.node(p).name);
    nodes.push_back({{"name", n.name}, {"parents", parents}, {"edges", n.edges}, {"cpt", n.cpt}});
  }
  return nodes;
}

DiscreteBayesNet net_from_json(const json& j) {
  std::vector<BayesNode> nodes;
  for (const auto& jn : j) {
    BayesNode n;
    n.name = jn.at("name").get<std::string>();
    for (const auto& pname : jn.at("parents")) {
      const auto name = pname.get<std::string>();
      const auto it = std::find_if(nodes.begin(), nodes.end(),
                                   [&](const BayesNode& m) { return m.name == name; });
      if (it == nodes.end()) {
        throw std::invalid_argument("model file: parent '" + name + "' must precede '" + n.name + "'");
      }
      n.parents.push_back(static_cast<std::size_t>(it - nodes.begin()));
    }
    n.edges = jn.at("edges").get<std::vector<double>>();
    if (jn.contains("cpt")) n.cpt = jn.at("cpt").get<std::vector<std::vector<double>>>();
    nodes.push_back(std::move(n));
  }
  return DiscreteBayesNet(std::move(nodes));
}

}  // namespace

void write_model_json(std::ostream& out, const EncounterModel& model) {
  json doc = {
      {"format", kModelFormat},
      {"version", kModelVersion},
      {"mode", model.mode() == EncounterMode::Correlated ? "correlated" : "uncorrelated"},
      {"duration", model.duration()},
      {"dt", model.dt()},
      {"initial_net", net_to_json(model.initial_net())},
      {"transition_net", net_to_json(model.transition_net())},
  };
  out << doc.dump(2) << '\n';
}

EncounterModel read_model_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("model file: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) {
      throw std::invalid_argument("model file: unexpected format tag");
    }
    if (doc.at("version").get<int>() != kModelVersion) {
      throw std::invalid_argument("model file: unsupported version");
    }
    const auto mode_name = doc.at("mode").get<std::string>();
    EncounterMode mode;
    if (mode_name == "correlated") {
      mode = EncounterMode::Correlated;
    } else if (mode_name == "uncorrelated") {
      mode = EncounterMode::Uncorrelated;
    } else {
      throw std::invalid_argument("model file: unknown mode '" + mode_name + "'");
    }
    return EncounterModel(net_from_json(doc.at("initial_net")),
                          net_from_json(doc.value("transition_net", json::array())), mode,
                          doc.at("duration").get<double>(), doc.at("dt").get<double>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model file: ") + e.what());
  }
}

}  // namespace cas
