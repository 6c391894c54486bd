#include "cas/tcas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cas {

void TcasConfig::validate() const {
  if (!(ra_tau > 0.0) || !(ta_tau >= ra_tau)) {
    throw std::invalid_argument("tcas: require ta_tau >= ra_tau > 0");
  }
  if (!(alim > 0.0)) throw std::invalid_argument("tcas: alim must be positive");
  if (!(miss_distance_threshold > 0.0) || !(vertical_threshold > 0.0)) {
    throw std::invalid_argument("tcas: thresholds must be positive");
  }
  if (hysteresis_steps < 1) throw std::invalid_argument("tcas: hysteresis must be >= 1 step");
  pilot.validate();
}

ClosestApproach closest_approach(const AircraftState& own, const AircraftState& intruder) {
  const Eigen::Vector2d p = (intruder.position - own.position).head<2>();
  const Eigen::Vector2d v = (intruder.velocity - own.velocity).head<2>();
  const double v2 = v.squaredNorm();
  ClosestApproach cpa;
  cpa.time = v2 > 0.0 ? -p.dot(v) / v2 : 0.0;
  const double t = std::max(cpa.time, 0.0);
  cpa.horizontal_miss = (p + t * v).norm();
  const double dz = intruder.position.z() - own.position.z();
  const double dvz = intruder.velocity.z() - own.velocity.z();
  cpa.vertical_miss = std::abs(dz + dvz * t);
  return cpa;
}

ThreatLevel assess_threat(const AircraftState& own, const AircraftState& intruder,
                          const TcasConfig& cfg) {
  const auto cpa = closest_approach(own, intruder);
  if (cpa.time < 0.0) return ThreatLevel::None;
  if (cpa.horizontal_miss >= cfg.miss_distance_threshold) return ThreatLevel::None;
  if (cpa.vertical_miss >= cfg.vertical_threshold) return ThreatLevel::None;
  if (cpa.time <= cfg.ra_tau) return ThreatLevel::RA;
  if (cpa.time <= cfg.ta_tau) return ThreatLevel::TA;
  return ThreatLevel::None;
}

namespace {

VerticalKinematics vertical_of(const AircraftState& s) {
  return {s.position.z(), s.velocity.z()};
}

}  // namespace

double sense_separation(const AircraftState& own, const AircraftState& intruder, Advisory advisory,
                        const TcasConfig& cfg) {
  const double horizon = std::max(closest_approach(own, intruder).time, 0.0);
  const double offset =
      projected_offset(vertical_of(own), vertical_of(intruder), advisory, cfg.pilot, horizon);
  return sense_of(advisory) == Sense::Down ? -offset : offset;
}

Sense select_sense(const AircraftState& own, const AircraftState& intruder, const TcasConfig& cfg) {
  const double up = sense_separation(own, intruder, Advisory::CL1500, cfg);
  const double down = sense_separation(own, intruder, Advisory::DES1500, cfg);
  if (up > down) return Sense::Up;
  if (down > up) return Sense::Down;
  return cfg.tie_sense;
}

Advisory select_strength(const AircraftState& own, const AircraftState& intruder, Sense sense,
                         const TcasConfig& cfg) {
  if (sense == Sense::None) throw std::invalid_argument("select_strength: no sense");
  for (int strength = 1; strength <= 3; ++strength) {
    const Advisory candidate = advisory_for(sense, strength);
    if (sense_separation(own, intruder, candidate, cfg) >= cfg.alim) return candidate;
  }
  return advisory_for(sense, 3);
}

Advisory arbitrate_multithreat(std::span<const ThreatResolution> per_intruder) {
  if (per_intruder.empty()) throw std::invalid_argument("arbitrate_multithreat: no intruders");
  std::vector<ThreatResolution> ras;
  for (const auto& r : per_intruder) {
    if (r.advisory != Advisory::COC) ras.push_back(r);
  }
  if (ras.empty()) return Advisory::COC;
  if (ras.size() == 1) return ras.front().advisory;
  const Sense sense = sense_of(ras.front().advisory);
  const bool same_sense = std::all_of(ras.begin(), ras.end(), [&](const ThreatResolution& r) {
    return sense_of(r.advisory) == sense;
  });
  if (same_sense) {
    return std::max_element(ras.begin(), ras.end(), [](const auto& a, const auto& b) {
             return strength_of(a.advisory) < strength_of(b.advisory);
           })->advisory;
  }
  return std::min_element(ras.begin(), ras.end(), [](const auto& a, const auto& b) {
           return a.time_to_cpa < b.time_to_cpa;
         })->advisory;
}

TcasLogic::TcasLogic(TcasConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Advisory TcasLogic::update(const AircraftState& own, std::span<const AircraftState> intruders,
                           std::optional<Sense> forced_sense) {
  std::vector<ThreatResolution> resolutions;
  last_threat_ = ThreatLevel::None;
  for (const auto& intruder : intruders) {
    ThreatLevel level = assess_threat(own, intruder, cfg_);
    const auto cpa = closest_approach(own, intruder);
    // an issued RA stays up until the intruder stops closing or leaves the horizontal gate
    if (current_ != Advisory::COC && level != ThreatLevel::RA && cpa.time > 0.0 &&
        cpa.horizontal_miss < cfg_.miss_distance_threshold) {
      level = ThreatLevel::RA;
    }
    if (level > last_threat_) last_threat_ = level;
    if (level != ThreatLevel::RA) continue;
    const Sense sense = forced_sense ? *forced_sense : select_sense(own, intruder, cfg_);
    resolutions.push_back({select_strength(own, intruder, sense, cfg_), cpa.time});
  }
  const Advisory selected =
      resolutions.empty() ? Advisory::COC : arbitrate_multithreat(resolutions);

  if (selected == Advisory::COC || current_ == Advisory::COC || selected == current_) {
    current_ = selected;
    pending_count_ = 0;
    return current_;
  }
  if (selected == pending_) {
    ++pending_count_;
  } else {
    pending_ = selected;
    pending_count_ = 1;
  }
  if (pending_count_ >= cfg_.hysteresis_steps) {
    current_ = selected;
    pending_count_ = 0;
  }
  return current_;
}

}  // namespace cas
