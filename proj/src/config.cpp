#include "cas/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cas/errors.hpp"

namespace cas {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw CodedError("E_CONFIG_INVALID", kExitBadConfig, what);
}

/// Reads fields from one JSON object; keys nobody asked for are reported to `unknown`.
class Section {
 public:
  Section(const json& doc, std::string where, std::vector<std::string>& unknown)
      : doc_(doc), where_(std::move(where)), unknown_(unknown) {
    if (!doc_.is_object()) invalid(where_ + " must be an object");
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;
  ~Section() {
    for (const auto& [key, _] : doc_.items()) {
      if (!seen_.count(key)) unknown_.push_back(where_ + "." + key);
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      invalid("bad type for " + where_ + "." + key);
    }
  }

  void mark(const char* key) { seen_.insert(key); }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    if (!doc_.contains(key)) return std::nullopt;
    return std::optional<Section>(std::in_place, doc_.at(key), where_ + "." + key, unknown_);
  }

 private:
  const json& doc_;
  std::string where_;
  std::vector<std::string>& unknown_;
  std::set<std::string> seen_;
};

void read_pilot(Section& s, PilotModel& p) {
  s.get("response_probability", p.response_probability);
  s.get("acceleration", p.acceleration);
  s.get("deterministic_delay", p.deterministic_delay);
}

json pilot_json(const PilotModel& p) {
  return {{"response_probability", p.response_probability},
          {"acceleration", p.acceleration},
          {"deterministic_delay", p.deterministic_delay}};
}

std::string method_name(EstimationMethod m) {
  switch (m) {
    case EstimationMethod::MonteCarlo: return "mc";
    case EstimationMethod::Importance: return "is";
    case EstimationMethod::CrossEntropy: return "ce";
  }
  return "mc";
}

EstimationMethod method_from_name(const std::string& name) {
  if (name == "mc") return EstimationMethod::MonteCarlo;
  if (name == "is") return EstimationMethod::Importance;
  if (name == "ce") return EstimationMethod::CrossEntropy;
  invalid("unknown evaluation.method '" + name + "'");
}

Sense sense_from_name(const std::string& name) {
  if (name == "up") return Sense::Up;
  if (name == "down") return Sense::Down;
  invalid("tie_sense must be up or down");
}

void check(bool ok, const std::string& what) {
  if (!ok) invalid(what);
}

template <typename Fn>
void wrap(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    invalid(e.what());
  }
}

}  // namespace

std::string logic_name(LogicKind kind) {
  switch (kind) {
    case LogicKind::None: return "none";
    case LogicKind::Tcas: return "tcas";
    case LogicKind::Table: return "table";
  }
  return "none";
}

LogicKind logic_from_name(const std::string& name) {
  if (name == "none") return LogicKind::None;
  if (name == "tcas") return LogicKind::Tcas;
  if (name == "table") return LogicKind::Table;
  invalid("unknown logic '" + name + "' (expected none, tcas or table)");
}

Grid GridSpec::build() const {
  auto to_fps = [](const std::vector<double>& fpm) {
    std::vector<double> out;
    out.reserve(fpm.size());
    for (double v : fpm) out.push_back(v * kFeetPerMinute);
    return out;
  };
  return Grid(h, to_fps(hdot0_fpm), to_fps(hdot1_fpm), tau_max);
}

GridSpec default_grid_spec() {
  const Grid g = default_grid();
  GridSpec spec;
  spec.h = g.h();
  spec.hdot0_fpm = {-2500, -2000, -1500, -1000, -500, -250, 0, 250, 500, 1000, 1500, 2000, 2500};
  spec.hdot1_fpm = spec.hdot0_fpm;
  spec.tau_max = g.tau_max();
  return spec;
}

void RunConfig::validate() const {
  check(schema_version == kConfigSchemaVersion, "unsupported schema_version");
  wrap([&] {
    (void)grid.build();
    reward.validate();
    pilot.validate();
    intruder.validate();
    tcas.validate();
    online.validate(reward.collision_cost);
    evaluation.pilot.validate();
  });
  check(belief.particles >= 1 && belief.sigma_h >= 0.0 && belief.sigma_rate >= 0.0, "belief noise out of range");
  check(separation_threshold >= 0.0 && std::isfinite(separation_threshold), "separation_threshold out of range");
  check(evaluation.n >= 1, "evaluation.n must be at least 1");
  check(evaluation.ce_iterations >= 0, "evaluation.ce_iterations must be non-negative");
  check(evaluation.ce_samples >= 1, "evaluation.ce_samples must be at least 1");
  check(evaluation.ce_elite_fraction > 0.0 && evaluation.ce_elite_fraction <= 1.0,
        "evaluation.ce_elite_fraction must be in (0, 1]");
  check(evaluation.ce_prior >= 0.0 && std::isfinite(evaluation.ce_prior), "evaluation.ce_prior out of range");
  check(fit.prior >= 0.0 && std::isfinite(fit.prior), "fit.prior out of range");
  check(sample.count >= 1, "sample.count must be at least 1");
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  std::vector<std::string> unknown;
  {
    Section root(doc, "config", unknown);
    root.get("schema_version", cfg.schema_version);
    if (cfg.schema_version != kConfigSchemaVersion) invalid("unsupported schema_version");
    if (auto s = root.child("paths")) {
      s->get("model", cfg.paths.model);
      s->get("table", cfg.paths.table);
      s->get("proposal", cfg.paths.proposal);
      s->get("output_dir", cfg.paths.output_dir);
      s->get("initial_data", cfg.paths.initial_data);
      s->get("transition_data", cfg.paths.transition_data);
    }
    if (auto s = root.child("grid")) {
      s->get("h", cfg.grid.h);
      s->get("hdot0_fpm", cfg.grid.hdot0_fpm);
      s->get("hdot1_fpm", cfg.grid.hdot1_fpm);
      s->get("tau_max", cfg.grid.tau_max);
    }
    if (auto s = root.child("reward")) {
      s->get("collision_cost", cfg.reward.collision_cost);
      s->get("alert_cost", cfg.reward.alert_cost);
      s->get("strengthen_cost", cfg.reward.strengthen_cost);
      s->get("reversal_cost", cfg.reward.reversal_cost);
      s->get("nmac_vertical", cfg.reward.nmac_vertical);
    }
    if (auto s = root.child("pilot")) read_pilot(*s, cfg.pilot);
    if (auto s = root.child("intruder")) s->get("sigma_accel", cfg.intruder.sigma_accel);
    if (auto s = root.child("tcas")) {
      s->get("ta_tau", cfg.tcas.ta_tau);
      s->get("ra_tau", cfg.tcas.ra_tau);
      s->get("miss_distance_threshold", cfg.tcas.miss_distance_threshold);
      s->get("vertical_threshold", cfg.tcas.vertical_threshold);
      s->get("alim", cfg.tcas.alim);
      if (auto p = s->child("pilot")) read_pilot(*p, cfg.tcas.pilot);
      std::string tie(name_of(cfg.tcas.tie_sense));
      s->get("tie_sense", tie);
      cfg.tcas.tie_sense = sense_from_name(tie);
      s->get("hysteresis_steps", cfg.tcas.hysteresis_steps);
    }
    if (auto s = root.child("online")) {
      s->get("inhibit_altitude", cfg.online.inhibit_altitude);
      s->get("cost_magnitude", cfg.online.cost_magnitude);
    }
    if (auto s = root.child("belief")) {
      s->get("particles", cfg.belief.particles);
      s->get("sigma_h", cfg.belief.sigma_h);
      s->get("sigma_rate", cfg.belief.sigma_rate);
    }
    root.get("separation_threshold", cfg.separation_threshold);
    if (auto s = root.child("evaluation")) {
      auto& e = cfg.evaluation;
      s->get("n", e.n);
      if (doc.at("evaluation").contains("seed") && !doc.at("evaluation").at("seed").is_null()) {
        std::uint64_t seed = 0;
        s->get("seed", seed);
        e.seed = seed;
      } else {
        s->mark("seed");
      }
      std::string own = logic_name(e.own_logic), intr = logic_name(e.intruder_logic);
      s->get("own_logic", own);
      s->get("intruder_logic", intr);
      e.own_logic = logic_from_name(own);
      e.intruder_logic = logic_from_name(intr);
      if (auto p = s->child("pilot")) read_pilot(*p, e.pilot);
      std::string method = method_name(e.method);
      s->get("method", method);
      e.method = method_from_name(method);
      s->get("baseline", e.baseline);
      s->get("write_outcomes", e.write_outcomes);
      s->get("encounter_index", e.encounter_index);
      s->get("ce_iterations", e.ce_iterations);
      s->get("ce_samples", e.ce_samples);
      s->get("ce_elite_fraction", e.ce_elite_fraction);
      s->get("ce_prior", e.ce_prior);
    }
    if (auto s = root.child("fit")) {
      s->get("structure", cfg.fit.structure);
      s->get("prior", cfg.fit.prior);
    }
    if (auto s = root.child("sample")) s->get("count", cfg.sample.count);
    if (auto s = root.child("slice")) {
      s->get("hdot0_fpm", cfg.slice.hdot0_fpm);
      s->get("hdot1_fpm", cfg.slice.hdot1_fpm);
      std::string a_prev(name_of(cfg.slice.a_prev));
      s->get("a_prev", a_prev);
      const auto parsed = advisory_from_name(a_prev);
      if (!parsed) invalid("unknown slice.a_prev '" + a_prev + "'");
      cfg.slice.a_prev = *parsed;
      s->get("sense_labels", cfg.slice.sense_labels);
    }
  }
  if (!unknown.empty()) invalid("unknown key " + unknown.front());
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CodedError("E_CONFIG_NOT_FOUND", kExitMissingInput, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  const auto& e = cfg.evaluation;
  json doc;
  doc["schema_version"] = cfg.schema_version;
  doc["paths"] = {{"model", cfg.paths.model},
                  {"table", cfg.paths.table},
                  {"proposal", cfg.paths.proposal},
                  {"output_dir", cfg.paths.output_dir},
                  {"initial_data", cfg.paths.initial_data},
                  {"transition_data", cfg.paths.transition_data}};
  doc["grid"] = {{"h", cfg.grid.h},
                 {"hdot0_fpm", cfg.grid.hdot0_fpm},
                 {"hdot1_fpm", cfg.grid.hdot1_fpm},
                 {"tau_max", cfg.grid.tau_max}};
  doc["reward"] = {{"collision_cost", cfg.reward.collision_cost},
                   {"alert_cost", cfg.reward.alert_cost},
                   {"strengthen_cost", cfg.reward.strengthen_cost},
                   {"reversal_cost", cfg.reward.reversal_cost},
                   {"nmac_vertical", cfg.reward.nmac_vertical}};
  doc["pilot"] = pilot_json(cfg.pilot);
  doc["intruder"] = {{"sigma_accel", cfg.intruder.sigma_accel}};
  doc["tcas"] = {{"ta_tau", cfg.tcas.ta_tau},
                 {"ra_tau", cfg.tcas.ra_tau},
                 {"miss_distance_threshold", cfg.tcas.miss_distance_threshold},
                 {"vertical_threshold", cfg.tcas.vertical_threshold},
                 {"alim", cfg.tcas.alim},
                 {"pilot", pilot_json(cfg.tcas.pilot)},
                 {"tie_sense", name_of(cfg.tcas.tie_sense)},
                 {"hysteresis_steps", cfg.tcas.hysteresis_steps}};
  doc["online"] = {{"inhibit_altitude", cfg.online.inhibit_altitude},
                   {"cost_magnitude", cfg.online.cost_magnitude}};
  doc["belief"] = {{"particles", cfg.belief.particles},
                   {"sigma_h", cfg.belief.sigma_h},
                   {"sigma_rate", cfg.belief.sigma_rate}};
  doc["separation_threshold"] = cfg.separation_threshold;
  doc["evaluation"] = {{"n", e.n},
                       {"seed", e.seed ? json(*e.seed) : json(nullptr)},
                       {"own_logic", logic_name(e.own_logic)},
                       {"intruder_logic", logic_name(e.intruder_logic)},
                       {"pilot", pilot_json(e.pilot)},
                       {"method", method_name(e.method)},
                       {"baseline", e.baseline},
                       {"write_outcomes", e.write_outcomes},
                       {"encounter_index", e.encounter_index},
                       {"ce_iterations", e.ce_iterations},
                       {"ce_samples", e.ce_samples},
                       {"ce_elite_fraction", e.ce_elite_fraction},
                       {"ce_prior", e.ce_prior}};
  doc["fit"] = {{"structure", cfg.fit.structure}, {"prior", cfg.fit.prior}};
  doc["sample"] = {{"count", cfg.sample.count}};
  doc["slice"] = {{"hdot0_fpm", cfg.slice.hdot0_fpm},
                  {"hdot1_fpm", cfg.slice.hdot1_fpm},
                  {"a_prev", name_of(cfg.slice.a_prev)},
                  {"sense_labels", cfg.slice.sense_labels}};
  return doc;
}

void write_config(std::ostream& out, const RunConfig& cfg) { out << to_json(cfg).dump(2) << '\n'; }

}  // namespace cas
