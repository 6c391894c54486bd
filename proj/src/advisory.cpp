#include "cas/advisory.hpp"

namespace cas {

double target_rate_fpm(Advisory a) {
  switch (a) {
    case Advisory::COC:
    case Advisory::DNC:
    case Advisory::DND: return 0.0;
    case Advisory::CL1500: return 1500.0;
    case Advisory::DES1500: return -1500.0;
    case Advisory::CL2500: return 2500.0;
    case Advisory::DES2500: return -2500.0;
  }
  return 0.0;
}

std::optional<RateBand> rate_band(Advisory a) {
  const double edge = target_rate_fpm(a) * kFeetPerMinute;
  switch (sense_of(a)) {
    case Sense::None: return std::nullopt;
    case Sense::Up: return RateBand{edge, std::numeric_limits<double>::infinity()};
    case Sense::Down: return RateBand{-std::numeric_limits<double>::infinity(), edge};
  }
  return std::nullopt;
}

namespace {
constexpr std::array<std::string_view, kNumAdvisories> kNames = {
    "COC", "DNC", "DND", "CL1500", "DES1500", "CL2500", "DES2500"};
}

std::string_view name_of(Advisory a) { return kNames[index_of(a)]; }

std::optional<Advisory> advisory_from_name(std::string_view name) {
  for (Advisory a : kAllAdvisories) {
    if (kNames[index_of(a)] == name) return a;
  }
  return std::nullopt;
}

std::string_view name_of(Sense s) {
  switch (s) {
    case Sense::None: return "COC";
    case Sense::Up: return "up";
    case Sense::Down: return "down";
  }
  return "COC";
}

}  // namespace cas
