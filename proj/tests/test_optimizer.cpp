#include <doctest.h>

#include <stdexcept>

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "cas/optimizer.hpp"
#include "oracle/expectimax.hpp"

using namespace cas;

namespace {

Grid micro_grid() { return Grid({-300, -100, 0, 100, 300}, {-20, 0, 20}, {-10, 0, 10}, 4); }

DynamicsModels models(double p, double accel, double sigma) {
  return DynamicsModels{PilotModel{p, accel, 5.0}, IntruderModel{sigma}};
}

VerticalState random_state(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> h(g.h().front(), g.h().back());
  std::uniform_real_distribution<double> r0(g.hdot0().front(), g.hdot0().back());
  std::uniform_real_distribution<double> r1(g.hdot1().front(), g.hdot1().back());
  std::uniform_int_distribution<int> tau(1, g.tau_max()), adv(0, 6);
  return {h(rng), r0(rng), r1(rng), kAllAdvisories[static_cast<std::size_t>(adv(rng))], tau(rng)};
}

double total(const std::vector<WeightedState>& d) {
  double s = 0;
  for (const auto& w : d) s += w.weight;
  return s;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("validation") {
    CHECK_THROWS_AS(Grid({-1, 0, 2}, {0}, {0}, 3), std::invalid_argument);  // asymmetric h
    CHECK_THROWS_AS(Grid({-1, 1, 0}, {0}, {0}, 3), std::invalid_argument);  // not increasing
    CHECK_THROWS_AS(Grid({-1, 0, 1}, {}, {0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(Grid({-1, 0, 1}, {0}, {0}, -1), std::invalid_argument);
  }
  TEST_CASE("default grid shape") {
    const Grid g = default_grid();
    CHECK(g.h().size() == 33);
    CHECK(g.hdot0().size() == 13);
    CHECK(g.hdot1().size() == 13);
    CHECK(g.tau_max() == 40);
    CHECK(g.h().front() == -4000);
    CHECK(g.hdot0().back() == doctest::Approx(2500.0 / 60.0));
    CHECK(g.state_count() * kNumAdvisories == 33u * 13 * 13 * 7 * 41 * 7);
  }
  TEST_CASE("state index round trip") {
    const Grid g = micro_grid();
    for (std::size_t i = 0; i < g.state_count(); i += 7) {
      const auto s = g.state_at(i);
      std::size_t ih = 0, i0 = 0, i1 = 0;
      while (g.h()[ih] != s.h) ++ih;
      while (g.hdot0()[i0] != s.hdot0) ++i0;
      while (g.hdot1()[i1] != s.hdot1) ++i1;
      CHECK(g.state_index(s.tau, s.a_prev, g.vertex_index(ih, i0, i1)) == i);
    }
    CHECK_THROWS_AS(g.state_at(g.state_count()), std::out_of_range);
  }
}

TEST_SUITE("transition_distribution") {
  TEST_CASE("deterministic level flight keeps the vertex") {
    const Grid g = micro_grid();
    const VerticalState s{100, 0, 0, Advisory::COC, 3};
    const auto d = transition_distribution(s, Advisory::COC, models(1.0, 8, 0.0), g);
    REQUIRE(d.size() == 1);
    CHECK(d[0].weight == 1.0);
    CHECK(g.state_at(d[0].index) == VerticalState{100, 0, 0, Advisory::COC, 2});
  }

  TEST_CASE("sums to one on random states and actions") {
    std::mt19937_64 rng(1);
    const Grid g = micro_grid();
    for (int i = 0; i < 1000; ++i) {
      const auto s = random_state(g, rng);
      const Advisory a = kAllAdvisories[rng() % 7];
      const auto d = transition_distribution(s, a, models(1.0 / 6.0, kGravity / 4, 3.0), g);
      CHECK(std::abs(total(d) - 1.0) <= 1e-9);
      for (const auto& w : d) {
        CHECK(w.weight >= 0.0);
        CHECK(g.state_at(w.index).tau == s.tau - 1);
        CHECK(g.state_at(w.index).a_prev == a);
      }
    }
  }

  TEST_CASE("p=1 DES1500 from level: ownship rate becomes -accel") {
    const Grid g({-300, -100, 0, 100, 300}, {-30, -10, 0, 10, 30}, {-30, -10, 0, 10, 30}, 4);
    const double accel = kGravity / 4;
    const auto d = transition_distribution({0, 0, 0, Advisory::COC, 2}, Advisory::DES1500, models(1.0, accel, 3.0), g);
    double mean_h = 0, mean_r0 = 0, mean_r1 = 0;
    for (const auto& w : d) {
      const auto s = g.state_at(w.index);
      mean_h += w.weight * s.h;
      mean_r0 += w.weight * s.hdot0;
      mean_r1 += w.weight * s.hdot1;
    }
    CHECK(mean_r0 == doctest::Approx(-accel));
    CHECK(mean_r1 == doctest::Approx(0.0));
    CHECK(mean_h == doctest::Approx(accel / 2));  // ownship sinks accel/2 ft, h = intruder - own
  }

  TEST_CASE("terminal or off-grid tau is rejected") {
    CHECK_THROWS_AS(transition_distribution({0, 0, 0, Advisory::COC, 0}, Advisory::COC, {}, micro_grid()),
                    std::invalid_argument);
    CHECK_THROWS_AS(transition_distribution({0, 0, 0, Advisory::COC, 9}, Advisory::COC, {}, micro_grid()),
                    std::out_of_range);
  }
}

TEST_SUITE("reward") {
  TEST_CASE("components") {
    const RewardParams p;
    CHECK(reward({0, 0, 0, Advisory::COC, 0}, Advisory::COC, p) == p.collision_cost);
    CHECK(reward({0, 0, 0, Advisory::DES1500, 0}, Advisory::CL1500, p) == p.collision_cost + p.reversal_cost);
    CHECK(reward({500, 0, 0, Advisory::COC, 5}, Advisory::COC, p) == 0.0);
    CHECK(reward({500, 0, 0, Advisory::CL1500, 5}, Advisory::DES1500, p) == p.reversal_cost);
    CHECK(reward({500, 0, 0, Advisory::COC, 5}, Advisory::DNC, p) == p.alert_cost);
    CHECK(reward({500, 0, 0, Advisory::DNC, 5}, Advisory::DES2500, p) == p.strengthen_cost);
    CHECK(reward({500, 0, 0, Advisory::DES2500, 5}, Advisory::DES1500, p) == 0.0);
    CHECK(reward({100, 0, 0, Advisory::COC, 0}, Advisory::COC, p) == 0.0);  // strict |h| < 100
  }
  TEST_CASE("validation") {
    RewardParams p;
    p.alert_cost = 0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }
}

TEST_SUITE("backward_induction") {
  TEST_CASE("micro-grid matches brute-force expectimax") {
    const Grid g = micro_grid();
    const auto m = models(1.0 / 6.0, kGravity / 4, 3.0);
    const RewardParams params;
    const auto start = std::chrono::steady_clock::now();
    const LogicTable table = backward_induction(g, m, params);
    oracle::Expectimax brute({g.h(), g.hdot0(), g.hdot1()}, oracle::Params{});
    double worst = 0;
    for (int tau = 0; tau <= g.tau_max(); ++tau) {
      for (int ap = 0; ap < 7; ++ap) {
        for (int ih = 0; ih < 5; ++ih) {
          for (int i0 = 0; i0 < 3; ++i0) {
            for (int i1 = 0; i1 < 3; ++i1) {
              const auto idx = g.state_index(tau, kAllAdvisories[ap], g.vertex_index(ih, i0, i1));
              for (int a = 0; a < 7; ++a) {
                worst = std::max(worst, std::abs(table.value(idx, kAllAdvisories[a]) - brute.q(tau, ap, ih, i0, i1, a)));
              }
            }
          }
        }
      }
    }
    CHECK(worst <= 1e-9);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 10.0);
  }

  TEST_CASE("toy grid: descending avoids the collision, COC does not") {
    const Grid g({-100, -87.5, 0, 87.5, 100}, {-25, 0, 25}, {-25, 0, 25}, 1);
    RewardParams params{-1.0, 0.0, 0.0, 0.0};
    const LogicTable table = backward_induction(g, models(1.0, 25.0, 0.0), params);
    const auto idx = g.state_index(1, Advisory::COC, g.vertex_index(3, 1, 1));  // h = 87.5, level
    CHECK(table.value(idx, Advisory::COC) == -1.0);
    CHECK(table.value(idx, Advisory::DES1500) == 0.0);
    CHECK(table.value(idx, Advisory::CL1500) == -1.0);
  }

  TEST_CASE("zero rewards give zero values") {
    const LogicTable t = backward_induction(micro_grid(), {}, RewardParams{0, 0, 0, 0});
    CHECK(t.values().cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("values fall as the collision cost grows; bounds hold") {
    const Grid g = micro_grid();
    RewardParams mild, harsh;
    harsh.collision_cost = -5.0;
    const auto a = backward_induction(g, {}, mild), b = backward_induction(g, {}, harsh);
    CHECK((b.values().array() <= a.values().array() + 1e-12).all());
    const double floor = harsh.collision_cost +
                         (g.tau_max() + 1) * (harsh.alert_cost + harsh.strengthen_cost + harsh.reversal_cost);
    CHECK(b.values().maxCoeff() <= 0.0);
    CHECK(b.values().minCoeff() >= floor);
  }

  TEST_CASE("mirror symmetry") {
    const Grid g({-400, -150, -50, 0, 50, 150, 400}, {-30, -10, 0, 10, 30}, {-30, -10, 0, 10, 30}, 8);
    const LogicTable t = backward_induction(g, {}, {});
    const auto n = g.h().size(), r0 = g.hdot0().size(), r1 = g.hdot1().size();
    double worst = 0;
    for (int tau = 0; tau <= g.tau_max(); ++tau) {
      for (Advisory ap : kAllAdvisories) {
        for (std::size_t ih = 0; ih < n; ++ih) {
          for (std::size_t i0 = 0; i0 < r0; ++i0) {
            for (std::size_t i1 = 0; i1 < r1; ++i1) {
              const auto s = g.state_index(tau, ap, g.vertex_index(ih, i0, i1));
              const auto m = g.state_index(tau, mirror(ap), g.vertex_index(n - 1 - ih, r0 - 1 - i0, r1 - 1 - i1));
              for (Advisory a : kAllAdvisories) worst = std::max(worst, std::abs(t.value(s, a) - t.value(m, mirror(a))));
            }
          }
        }
      }
    }
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("worker count does not change the table") {
    const Grid g({-400, -150, -50, 0, 50, 150, 400}, {-30, 0, 30}, {-30, 0, 30}, 6);
    const auto a = backward_induction(g, {}, {}, 1), b = backward_induction(g, {}, {}, 4);
    CHECK(a.values() == b.values());
  }
}

TEST_SUITE("policy slice") {
  TEST_CASE("all-zero table slices to COC") {
    const Grid g = micro_grid();
    const LogicTable t(g, LogicTable::Matrix::Zero(7, static_cast<Eigen::Index>(g.state_count())));
    const auto s = policy_slice(t, 0, 0, Advisory::COC);
    for (Advisory a : s.cells) CHECK(a == Advisory::COC);
    CHECK(s.cells.size() == 5u * 5);
  }

  TEST_CASE("fixed values must be on the grid") {
    const LogicTable t = backward_induction(micro_grid(), {}, {});
    CHECK_THROWS_AS(policy_slice(t, 5, 0, Advisory::COC), std::out_of_range);
    CHECK_NOTHROW(policy_slice(t, 20, -10, Advisory::DES1500));
  }

  TEST_CASE("tie break order") {
    ActionValues v = ActionValues::Zero();
    CHECK(argmax_advisory(v) == Advisory::COC);
    v.setConstant(-1);
    v(index_of(Advisory::CL1500)) = 0;
    v(index_of(Advisory::DES1500)) = 0;
    CHECK(argmax_advisory(v) == Advisory::DES1500);
    v(index_of(Advisory::DNC)) = 0;
    CHECK(argmax_advisory(v) == Advisory::DNC);
  }

  TEST_CASE("csv layout") {
    const LogicTable t = backward_induction(micro_grid(), {}, {});
    std::stringstream out;
    write_slice_csv(out, policy_slice(t, 0, 0, Advisory::COC));
    std::string header;
    std::getline(out, header);
    CHECK(header == "tau,-300,-100,0,100,300");
    int rows = 0;
    for (std::string line; std::getline(out, line);) {
      ++rows;
      CHECK(line.rfind(std::to_string(rows - 1) + ",", 0) == 0);
      CHECK(line.find("DES") == std::string::npos);  // sense labels only
    }
    CHECK(rows == 5);
  }
}

TEST_SUITE("table file") {
  TEST_CASE("write -> read -> write is byte identical") {
    const LogicTable t = backward_induction(micro_grid(), {}, {});
    std::stringstream a;
    write_table(a, t);
    const std::string first = a.str();
    CHECK(first.substr(0, 4) == "ACXT");
    const LogicTable back = read_table(a);
    CHECK(back.grid() == t.grid());
    CHECK((back.values() - t.values()).cwiseAbs().maxCoeff() < 1e-6);
    std::stringstream b;
    write_table(b, back);
    CHECK(b.str() == first);
  }

  TEST_CASE("corrupt input is rejected") {
    const LogicTable t = backward_induction(micro_grid(), {}, {});
    std::stringstream a;
    write_table(a, t);
    const std::string bytes = a.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS(read_table(truncated));
    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    std::stringstream m(bad_magic);
    CHECK_THROWS(read_table(m));
    std::string bad_version = bytes;
    bad_version[4] = 9;
    std::stringstream v(bad_version);
    CHECK_THROWS(read_table(v));
  }
}
