#include <doctest.h>

#include <stdexcept>

#include "cas/tcas.hpp"

using namespace cas;

namespace {

AircraftState at(double x, double z, double vx, double vz) {
  AircraftState s;
  s.position = {x, 0.0, z};
  s.velocity = {vx, 0.0, vz};
  return s;
}

AircraftState flipped(AircraftState s) {
  s.position.z() = -s.position.z();
  s.velocity.z() = -s.velocity.z();
  return s;
}

// Intruder ahead and slightly above, ownship climbing slowly (500 ft/min), 20 s to CPA.
const AircraftState kOwnClimbing = at(0, 0, 200, 500.0 / 60.0);
const AircraftState kIntrAbove = at(8000, 200, -200, 0);

}  // namespace

TEST_SUITE("tcas threat") {
  TEST_CASE("diverging aircraft -> none") {
    CHECK(assess_threat(at(0, 0, -200, 0), at(3000, 0, 200, 0), TcasConfig{}) == ThreatLevel::None);
  }
  TEST_CASE("head-on 20 s with zero miss -> RA") {
    CHECK(assess_threat(at(0, 0, 200, 0), at(8000, 0, -200, 0), TcasConfig{}) == ThreatLevel::RA);
  }
  TEST_CASE("tau between ra_tau and ta_tau -> TA") {
    CHECK(assess_threat(at(0, 0, 200, 0), at(12000, 0, -200, 0), TcasConfig{}) == ThreatLevel::TA);
    CHECK(assess_threat(at(0, 0, 200, 0), at(20000, 0, -200, 0), TcasConfig{}) == ThreatLevel::None);
  }
  TEST_CASE("large horizontal or vertical miss -> none") {
    AircraftState offset = at(8000, 0, -200, 0);
    offset.position.y() = 1.3 * kFeetPerNauticalMile;
    CHECK(assess_threat(at(0, 0, 200, 0), offset, TcasConfig{}) == ThreatLevel::None);
    CHECK(assess_threat(at(0, 0, 200, 0), at(8000, 2000, -200, 0), TcasConfig{}) == ThreatLevel::None);
  }
  TEST_CASE("shrinking tau never downgrades the threat") {
    int last = -1;
    for (double range = 30000; range >= 500; range -= 250) {
      const int level = static_cast<int>(assess_threat(at(0, 0, 200, 0), at(range, 100, -200, 0), TcasConfig{}));
      CHECK(level >= last);
      last = level;
    }
  }
  TEST_CASE("closest approach") {
    const auto cpa = closest_approach(at(0, 0, 200, 0), at(8000, 300, -200, -5));
    CHECK(cpa.time == doctest::Approx(20.0));
    CHECK(cpa.horizontal_miss == doctest::Approx(0.0));
    CHECK(cpa.vertical_miss == doctest::Approx(200.0));
  }
  TEST_CASE("config validation") {
    TcasConfig c;
    c.ta_tau = 10;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TcasConfig{};
    c.alim = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
}

TEST_SUITE("tcas selection") {
  TEST_CASE("level intruder above a level ownship -> down; mirrored -> up") {
    const auto own = at(0, 0, 200, 0), intr = at(8000, 150, -200, 0);
    CHECK(select_sense(own, intr, TcasConfig{}) == Sense::Down);
    CHECK(select_sense(flipped(own), flipped(intr), TcasConfig{}) == Sense::Up);
  }

  TEST_CASE("intruder ahead, slightly above, ownship climbing slowly -> down, DES1500") {
    const TcasConfig cfg;
    REQUIRE(assess_threat(kOwnClimbing, kIntrAbove, cfg) == ThreatLevel::RA);
    CHECK(select_sense(kOwnClimbing, kIntrAbove, cfg) == Sense::Down);
    CHECK(sense_separation(kOwnClimbing, kIntrAbove, Advisory::DNC, cfg) < cfg.alim);
    CHECK(sense_separation(kOwnClimbing, kIntrAbove, Advisory::DES1500, cfg) >= cfg.alim);
    CHECK(select_strength(kOwnClimbing, kIntrAbove, Sense::Down, cfg) == Advisory::DES1500);
    // the stronger template separates further
    CHECK(sense_separation(kOwnClimbing, kIntrAbove, Advisory::DES2500, cfg) >=
          sense_separation(kOwnClimbing, kIntrAbove, Advisory::DES1500, cfg));
  }

  TEST_CASE("mirror symmetry swaps senses exactly") {
    const TcasConfig cfg;
    const auto own = flipped(kOwnClimbing), intr = flipped(kIntrAbove);
    CHECK(select_sense(own, intr, cfg) == Sense::Up);
    CHECK(select_strength(own, intr, Sense::Up, cfg) == Advisory::CL1500);
    for (Advisory a : kAllAdvisories) {
      if (a == Advisory::COC) continue;
      CHECK(sense_separation(own, intr, mirror(a), cfg) == doctest::Approx(sense_separation(kOwnClimbing, kIntrAbove, a, cfg)));
    }
  }

  TEST_CASE("weakest advisory when all reach ALIM; strongest when none does") {
    const TcasConfig cfg;
    CHECK(select_strength(at(0, 0, 200, 0), at(8000, 1500, -200, 0), Sense::Down, cfg) == Advisory::DNC);
    CHECK(select_strength(at(0, 0, 200, 0), at(8000, -1500, -200, 0), Sense::Up, cfg) == Advisory::DND);
    CHECK(select_strength(at(0, 0, 200, 50), at(1600, 0, -200, 0), Sense::Down, cfg) == Advisory::DES2500);
  }

  TEST_CASE("strength keeps the requested sense") {
    const TcasConfig cfg;
    for (double dz : {-600.0, -100.0, 0.0, 100.0, 600.0}) {
      for (Sense s : {Sense::Up, Sense::Down}) {
        CHECK(sense_of(select_strength(at(0, 0, 200, 0), at(6000, dz, -200, 0), s, cfg)) == s);
      }
    }
  }

  TEST_CASE("exact tie goes to the configured sense") {
    TcasConfig cfg;
    const auto own = at(0, 0, 200, 0), intr = at(8000, 0, -200, 0);
    CHECK(select_sense(own, intr, cfg) == Sense::Down);
    cfg.tie_sense = Sense::Up;
    CHECK(select_sense(own, intr, cfg) == Sense::Up);
  }
}

TEST_SUITE("tcas multithreat") {
  TEST_CASE("arbitration rules") {
    const ThreatResolution one[] = {{Advisory::DES1500, 10}};
    CHECK(arbitrate_multithreat(one) == Advisory::DES1500);
    const ThreatResolution same[] = {{Advisory::DES1500, 10}, {Advisory::DES2500, 20}};
    CHECK(arbitrate_multithreat(same) == Advisory::DES2500);
    const ThreatResolution mixed[] = {{Advisory::CL1500, 30}, {Advisory::DES1500, 10}};
    CHECK(arbitrate_multithreat(mixed) == Advisory::DES1500);
    const ThreatResolution with_coc[] = {{Advisory::COC, 5}, {Advisory::CL2500, 20}};
    CHECK(arbitrate_multithreat(with_coc) == Advisory::CL2500);
    CHECK_THROWS_AS(arbitrate_multithreat(std::span<const ThreatResolution>{}), std::invalid_argument);
  }
}

TEST_SUITE("tcas runner") {
  TEST_CASE("issues, holds through hysteresis and clears after CPA") {
    TcasLogic logic{TcasConfig{}};
    AircraftState own = at(0, 0, 200, 0), intr = at(12000, 150, -200, 0);
    const AircraftState intruders[] = {intr};
    CHECK(logic.update(own, intruders) == Advisory::COC);
    CHECK(logic.last_threat() == ThreatLevel::TA);
    int ra_steps = 0;
    for (int k = 0; k < 60; ++k) {
      own.position.x() += 200;
      intr.position.x() -= 200;
      const AircraftState now[] = {intr};
      ra_steps += logic.update(own, now) != Advisory::COC;
    }
    CHECK(ra_steps > 0);
    CHECK(logic.current() == Advisory::COC);  // diverging at the end
  }

  TEST_CASE("a different selection must persist before replacing the RA") {
    TcasLogic logic{TcasConfig{}};
    const auto own = at(0, 0, 200, 0);
    const AircraftState above[] = {at(8000, 150, -200, 0)};
    REQUIRE(sense_of(logic.update(own, above)) == Sense::Down);
    const Advisory issued = logic.current();
    CHECK(logic.update(own, above, Sense::Up) == issued);  // first disagreeing step
    CHECK(sense_of(logic.update(own, above, Sense::Up)) == Sense::Up);
  }

  TEST_CASE("forced sense from coordination is honoured") {
    TcasLogic logic{TcasConfig{}};
    const AircraftState above[] = {at(8000, 150, -200, 0)};
    CHECK(sense_of(logic.update(at(0, 0, 200, 0), above, Sense::Up)) == Sense::Up);
  }
}
