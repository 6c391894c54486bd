#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace cas {

/// Vertical resolution advisories. The enumerator order is the advisory axis of a logic table.
enum class Advisory : std::uint8_t { COC, DNC, DND, CL1500, DES1500, CL2500, DES2500 };

inline constexpr std::size_t kNumAdvisories = 7;

inline constexpr std::array<Advisory, kNumAdvisories> kAllAdvisories = {
    Advisory::COC,     Advisory::DNC,    Advisory::DND,    Advisory::CL1500,
    Advisory::DES1500, Advisory::CL2500, Advisory::DES2500};

/// Selection preference used to break ties between equal action values:
/// COC first, weaker before stronger, down before up.
inline constexpr std::array<Advisory, kNumAdvisories> kTieBreakOrder = {
    Advisory::COC,     Advisory::DNC,     Advisory::DND,   Advisory::DES1500,
    Advisory::CL1500,  Advisory::DES2500, Advisory::CL2500};

enum class Sense : std::uint8_t { None, Up, Down };

inline constexpr double kFeetPerMinute = 1.0 / 60.0;  // in ft/s

constexpr std::size_t index_of(Advisory a) { return static_cast<std::size_t>(a); }

constexpr Sense sense_of(Advisory a) {
  switch (a) {
    case Advisory::COC: return Sense::None;
    case Advisory::DND:
    case Advisory::CL1500:
    case Advisory::CL2500: return Sense::Up;
    case Advisory::DNC:
    case Advisory::DES1500:
    case Advisory::DES2500: return Sense::Down;
  }
  return Sense::None;
}

constexpr Sense opposite(Sense s) {
  return s == Sense::Up ? Sense::Down : s == Sense::Down ? Sense::Up : Sense::None;
}

/// 0 for COC, 1 for DNC/DND, 2 for the 1500 ft/min advisories, 3 for 2500 ft/min.
constexpr int strength_of(Advisory a) {
  switch (a) {
    case Advisory::COC: return 0;
    case Advisory::DNC:
    case Advisory::DND: return 1;
    case Advisory::CL1500:
    case Advisory::DES1500: return 2;
    case Advisory::CL2500:
    case Advisory::DES2500: return 3;
  }
  return 0;
}

/// Same-sense advisory of the given strength (1..3).
constexpr Advisory advisory_for(Sense s, int strength) {
  constexpr std::array<Advisory, 3> up = {Advisory::DND, Advisory::CL1500, Advisory::CL2500};
  constexpr std::array<Advisory, 3> down = {Advisory::DNC, Advisory::DES1500, Advisory::DES2500};
  if (s == Sense::None || strength < 1 || strength > 3) return Advisory::COC;
  return s == Sense::Up ? up[strength - 1] : down[strength - 1];
}

/// Vertical mirror image: swaps senses, keeps strength.
constexpr Advisory mirror(Advisory a) { return advisory_for(opposite(sense_of(a)), strength_of(a)); }

constexpr bool is_strengthening(Advisory from, Advisory to) {
  return sense_of(from) != Sense::None && sense_of(from) == sense_of(to) &&
         strength_of(to) > strength_of(from);
}

constexpr bool is_reversal(Advisory from, Advisory to) {
  return sense_of(from) != Sense::None && sense_of(to) == opposite(sense_of(from));
}

/// Target vertical-rate interval, ft/s. Unbounded sides are infinite.
struct RateBand {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  constexpr bool contains(double rate) const { return rate >= lower && rate <= upper; }
  constexpr double clamp(double rate) const {
    return rate < lower ? lower : rate > upper ? upper : rate;
  }
};

/// Rate band an advisory commands, or nullopt for COC. Interface values are in ft/min.
std::optional<RateBand> rate_band(Advisory a);

/// Band edge in ft/min as published (e.g. 1500 for CL1500, -1500 for DES1500, 0 for DNC/DND).
double target_rate_fpm(Advisory a);

std::string_view name_of(Advisory a);
std::optional<Advisory> advisory_from_name(std::string_view name);
std::string_view name_of(Sense s);

}  // namespace cas
