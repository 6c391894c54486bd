// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cas/estimation.hpp"
#include "cas/optimizer.hpp"
#include "cas/qmdp.hpp"
#include "cas/tcas.hpp"
#include "oracle/expectimax.hpp"

using namespace cas;

namespace {

using Clock = std::chrono::steady_clock;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::shared_ptr<const LogicTable> default_table() {
  static const auto t = std::make_shared<const LogicTable>(backward_induction(default_grid(), {}, {}, workers()));
  return t;
}

// Bin enumeration: a vmd bin inside (-100, 100) always ends in NMAC, one outside never does.
double toy_p_nmac(double p) {
  const EncounterModel model = toy_two_bin_model(p);
  const DiscreteBayesNet& net = model.initial_net();
  const BayesNode& vmd = net.node(*net.find("vmd"));
  double total = 0;
  for (std::size_t b = 0; b < vmd.bins(); ++b) {
    if (vmd.edges[b] > -100 && vmd.edges[b + 1] <= 100) total += vmd.cpt[0][b];
  }
  return total;
}

AircraftState at(double x, double z, double vx, double vz) {
  AircraftState s;
  s.position = {x, 0, z};
  s.velocity = {vx, 0, vz};
  return s;
}

Result dp_oracle() {
  const auto start = Clock::now();
  const Grid g({-300, -100, 0, 100, 300}, {-20, 0, 20}, {-10, 0, 10}, 4);
  const LogicTable t = backward_induction(g, {}, {});
  oracle::Expectimax brute({g.h(), g.hdot0(), g.hdot1()}, oracle::Params{});
  double worst = 0;
  for (int tau = 0; tau <= 4; ++tau)
    for (int ap = 0; ap < 7; ++ap)
      for (int ih = 0; ih < 5; ++ih)
        for (int i0 = 0; i0 < 3; ++i0)
          for (int i1 = 0; i1 < 3; ++i1) {
            const auto s = g.state_index(tau, kAllAdvisories[ap], g.vertex_index(ih, i0, i1));
            for (int a = 0; a < 7; ++a)
              worst = std::max(worst, std::abs(t.value(s, kAllAdvisories[a]) - brute.q(tau, ap, ih, i0, i1, a)));
          }
  const double secs = seconds_since(start);
  return {worst <= 1e-9 && secs < 10.0, fmt("max |diff| %.3g, %.2f s", worst, secs)};
}

Result normalization() {
  const Grid g = default_grid();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> h(-4000, 4000), r(-2500 / 60.0, 2500 / 60.0);
  const DynamicsModels m;
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const VerticalState s{h(rng), r(rng), r(rng), kAllAdvisories[rng() % 7], 1 + static_cast<int>(rng() % 40)};
    double sum = 0;
    for (const auto& w : transition_distribution(s, kAllAdvisories[rng() % 7], m, g)) sum += w.weight;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return {worst <= 1e-9, fmt("max |sum - 1| %.3g over 10000 pairs", worst)};
}

LogicTable random_table(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 0);
  LogicTable::Matrix m(7, static_cast<Eigen::Index>(g.state_count()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (int i = 0; i < 7; ++i) m(i, j) = u(rng);
  return LogicTable(g, std::move(m));
}

Result interpolation() {
  const Grid g({-400, -100, 0, 100, 400}, {-20, 0, 20}, {-30, -10, 10, 30}, 3);
  const LogicTable t = random_table(g, 3);
  bool vertex = true;
  for (std::size_t i = 0; i < g.state_count(); ++i) vertex = vertex && interpolate(t, g.state_at(i)) == t.state_values(i);
  double mid = 0;
  for (std::size_t ih = 0; ih + 1 < g.h().size(); ++ih) {
    const auto lo = g.state_index(1, Advisory::DND, g.vertex_index(ih, 1, 2));
    const auto hi = g.state_index(1, Advisory::DND, g.vertex_index(ih + 1, 1, 2));
    const VerticalState q{(g.h()[ih] + g.h()[ih + 1]) / 2, 0, 10, Advisory::DND, 1};
    mid = std::max(mid, (interpolate(t, q) - 0.5 * (t.state_values(lo) + t.state_values(hi))).cwiseAbs().maxCoeff());
  }
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> h(-400, 400), r0(-20, 20), r1(-30, 30);
  bool convex = true;
  for (int n = 0; n < 10000; ++n) {
    const VerticalState q{h(rng), r0(rng), r1(rng), kAllAdvisories[rng() % 7], static_cast<int>(rng() % 4)};
    // corner values of the enclosing cell
    auto lower = [](const std::vector<double>& axis, double x) {
      std::size_t k = 0;
      while (k + 2 < axis.size() && axis[k + 1] <= x) ++k;
      return k;
    };
    const std::size_t ih = lower(g.h(), q.h), i0 = lower(g.hdot0(), q.hdot0), i1 = lower(g.hdot1(), q.hdot1);
    ActionValues lo = ActionValues::Constant(1e9), hi = ActionValues::Constant(-1e9);
    for (int c = 0; c < 8; ++c) {
      const auto v = t.state_values(g.state_index(q.tau, q.a_prev,
                                                  g.vertex_index(ih + (c & 1), i0 + ((c >> 1) & 1), i1 + ((c >> 2) & 1))));
      lo = lo.cwiseMin(ActionValues(v));
      hi = hi.cwiseMax(ActionValues(v));
    }
    const ActionValues v = interpolate(t, q);
    convex = convex && (v.array() >= lo.array() - 1e-12).all() && (v.array() <= hi.array() + 1e-12).all();
  }
  return {vertex && mid <= 1e-12 && convex,
          fmt("vertex exact %.0f, midpoint err %.3g, convex bound %.0f", vertex, mid, convex)};
}

Result qmdp_identity() {
  const Grid g({-400, -100, 0, 100, 400}, {-20, 0, 20}, {-30, -10, 10, 30}, 3);
  const LogicTable t = random_table(g, 5);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> h(-400, 400), r0(-20, 20), r1(-30, 30), w(0.05, 1);
  bool point = true;
  double lin = 0;
  for (int n = 0; n < 1000; ++n) {
    auto draw = [&] {
      return VerticalState{h(rng), r0(rng), r1(rng), kAllAdvisories[rng() % 7], static_cast<int>(rng() % 4)};
    };
    const VerticalState a = draw();
    VerticalState b = draw();
    b.tau = a.tau;
    point = point && belief_action_values(t, BeliefState::point_mass(a)) == interpolate(t, a);
    const double wa = w(rng), wb = w(rng), total = wa + wb;
    const BeliefState mix({{a, wa / total}, {b, wb / total}});
    const ActionValues expect = (wa / total) * interpolate(t, a) + (wb / total) * interpolate(t, b);
    lin = std::max(lin, (belief_action_values(t, mix) - expect).cwiseAbs().maxCoeff());
  }
  return {point && lin <= 1e-12, fmt("point mass exact %.0f, linearity err %.3g", point, lin)};
}

Result policy_slice_shape() {
  std::ostringstream csv;
  write_slice_csv(csv, policy_slice(*default_table(), 0, 0, Advisory::COC));
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  std::vector<double> h;
  {
    std::istringstream hdr(line);
    std::string cell;
    std::getline(hdr, cell, ',');
    while (std::getline(hdr, cell, ',')) h.push_back(std::stod(cell));
  }
  const auto zero = std::find(h.begin(), h.end(), 0.0) - h.begin();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::vector<std::string> cells;
    std::string cell;
    std::getline(row, cell, ',');
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  int notch_tau = -1;
  for (std::size_t tau = 0; tau < rows.size() && notch_tau < 0; ++tau) {
    if (rows[tau][zero] != "COC") continue;
    for (std::size_t k = 0; k < h.size(); ++k)
      if (h[k] != 0 && rows[tau][k] != "COC") notch_tau = static_cast<int>(tau);
  }
  bool coc_floor = !rows.empty();
  for (std::size_t k = 0; k < h.size() && coc_floor; ++k)
    if (std::abs(h[k]) <= 100) coc_floor = rows[0][k] == "COC";
  return {notch_tau >= 0 && coc_floor,
          fmt("coaltitude COC beside an advisory at tau=%.0f, COC at tau=0 for |h|<=100: %.0f", notch_tau, coc_floor)};
}

Result tcas_geometry() {
  const TcasConfig cfg;
  const AircraftState own = at(0, 0, 200, 500.0 / 60.0), intr = at(8000, 200, -200, 0);
  const Sense s = select_sense(own, intr, cfg);
  const Advisory a = select_strength(own, intr, s, cfg);
  auto flip = [](AircraftState x) {
    x.position.z() = -x.position.z();
    x.velocity.z() = -x.velocity.z();
    return x;
  };
  const Sense ms = select_sense(flip(own), flip(intr), cfg);
  const Advisory ma = select_strength(flip(own), flip(intr), ms, cfg);
  const bool ok = cfg.alim == 400 && s == Sense::Down && a == Advisory::DES1500 && ms == Sense::Up &&
                  ma == Advisory::CL1500;
  return {ok, std::string("sense ") + std::string(name_of(s)) + ", " + std::string(name_of(a)) + "; mirrored " +
                  std::string(name_of(ms)) + ", " + std::string(name_of(ma))};
}

Result safety_effect() {
  const auto start = Clock::now();
  const EncounterModel model = default_correlated_model();
  const std::uint64_t n = 10000, seed = 7;
  const EvaluationOptions opt{{}, workers()};
  Equipage bare;
  Equipage table;
  table.own.logic = LogicKind::Table;
  table.own.pilot.response_probability = 1.0;
  table.table = default_table();
  Equipage tcas;
  tcas.own.logic = LogicKind::Tcas;
  tcas.own.pilot.response_probability = 1.0;
  const MetricsReport r0 = estimate_metrics(model, bare, n, seed, opt);
  const MetricsReport r1 = estimate_metrics(model, table, n, seed, opt);
  const MetricsReport r2 = estimate_metrics(model, tcas, n, seed, opt);
  const double rr_table = risk_ratio(r1, r0).ratio, rr_tcas = risk_ratio(r2, r0).ratio;
  const double secs = seconds_since(start);
  return {rr_table <= 0.5 && rr_tcas <= 0.8 && secs < 300,
          fmt("p_nmac unequipped %.4f; risk ratio table %.4f, TCAS %.4f; %.1f s", r0.p_nmac, rr_table, rr_tcas, secs)};
}

Result importance_sampling() {
  const double p = 0.01, truth = toy_p_nmac(p);
  const EncounterModel nominal = toy_two_bin_model(p);
  const MetricsReport r = is_estimate(nominal, toy_two_bin_model(0.5), Equipage{}, 10000, 8);
  std::vector<EncounterOutcome> o;
  is_estimate(nominal, nominal, Equipage{}, 1000, 9, {}, &o);
  const bool unit = std::all_of(o.begin(), o.end(), [](const auto& x) { return std::abs(x.weight - 1) <= 1e-12; });
  const double z = std::abs(r.p_nmac - truth) / r.p_nmac_se;
  return {z <= 3 && unit, fmt("estimate %.5f vs %.5f (%.2f SE), unit weights %.0f", r.p_nmac, truth, z, unit)};
}

Result cross_entropy() {
  const double p = 0.01, truth = toy_p_nmac(p);
  const EncounterModel nominal = toy_two_bin_model(p);
  CrossEntropyOptions ce;
  const EncounterModel adapted = cross_entropy_adapt(nominal, nominal, Equipage{}, ce, 10);
  const double base = static_cast<double>(estimate_metrics(nominal, Equipage{}, 10000, 11).nmac_count) / 10000;
  const MetricsReport r = is_estimate(nominal, adapted, Equipage{}, 10000, 12);
  const double freq = static_cast<double>(r.nmac_count) / 10000;
  const double z = std::abs(r.p_nmac - truth) / r.p_nmac_se;
  return {freq >= 5 * base && z <= 3,
          fmt("NMAC frequency %.4f vs nominal %.4f; estimate %.5f (%.2f SE)", freq, base, r.p_nmac, z)};
}

Result coordination() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 0);
  long same = 0, violations = 0;
  for (int i = 0; i < 100000; ++i) {
    ActionValues vl, vf;
    for (int k = 0; k < 7; ++k) vl(k) = u(rng), vf(k) = u(rng);
    const Advisory lead = select_action(vl);
    OnlineContext ctx;
    if (auto msg = coordinate(lead, 1, 2)) ctx.constraint = msg->constraint;
    const Advisory follow = select_action(apply_online_costs(vf, ctx));
    if (sense_of(lead) != Sense::None && sense_of(lead) == sense_of(follow)) ++same;
    if (violates(ctx.constraint, follow)) ++violations;
  }
  return {same == 0 && violations == 0, fmt("same-sense pairs %.0f, constraint violations %.0f", same, violations)};
}

Result fusion() {
  ActionValues a;
  a << -0.3, -0.05, -0.9, -0.8, -0.02, -0.9, -0.01;  // intruder above: climbing is bad
  ActionValues b;  // intruder below, mirror image
  for (Advisory x : kAllAdvisories) b(index_of(x)) = a(index_of(mirror(x)));
  const std::vector<ActionValues> ab{a, b}, ba{b, a}, one{a};
  const Advisory pick = select_action(fuse_multithreat(ab));
  const bool perm = fuse_multithreat(ab) == fuse_multithreat(ba);
  const bool single = fuse_multithreat(one) == a;
  return {pick == Advisory::COC && perm && single,
          std::string("selected ") + std::string(name_of(pick)) + (perm ? ", permutation invariant" : ", order dependent") +
              (single ? ", single identity" : ", single differs")};
}

Result cpt_recovery() {
  const DiscreteBayesNet truth({
      {"a", {}, {0, 1, 2}, {{0.3, 0.7}}},
      {"b", {0}, {0, 1, 2, 3}, {{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}}},
      {"c", {0, 1}, {0, 1, 2}, {{0.9, 0.1}, {0.5, 0.5}, {0.25, 0.75}, {0.4, 0.6}, {0.15, 0.85}, {0.7, 0.3}}},
  });
  // independent ancestral sampler
  std::mt19937_64 rng(14);
  auto draw = [&](const std::vector<double>& row) {
    return static_cast<int>(std::discrete_distribution<int>(row.begin(), row.end())(rng));
  };
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < 100000; ++i) {
    const int a = draw(truth.node(0).cpt[0]);
    const int b = draw(truth.node(1).cpt[static_cast<std::size_t>(a)]);
    const int c = draw(truth.node(2).cpt[static_cast<std::size_t>(a * 3 + b)]);
    rows.push_back({a, b, c});
  }
  const DiscreteBayesNet fitted = fit_cpts(truth.structure(), rows, 1.0);
  double worst = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (std::size_t r = 0; r < truth.node(i).cpt.size(); ++r)
      for (std::size_t k = 0; k < truth.node(i).bins(); ++k)
        worst = std::max(worst, std::abs(truth.node(i).cpt[r][k] - fitted.node(i).cpt[r][k]));
  return {worst <= 0.02, fmt("max CPT error %.4f", worst)};
}

Result table_round_trip() {
  std::ostringstream first;
  write_table(first, *default_table());
  std::istringstream in(first.str());
  const LogicTable back = read_table(in);
  std::ostringstream second;
  write_table(second, back);
  const bool same = first.str() == second.str();
  return {same, fmt("%.0f bytes, identical %.0f", static_cast<double>(first.str().size()), same)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"DP oracle equivalence", dp_oracle},
      {"probability normalization", normalization},
      {"interpolation identities", interpolation},
      {"QMDP identity", qmdp_identity},
      {"policy slice shape", policy_slice_shape},
      {"TCAS sense and strength", tcas_geometry},
      {"safety effect", safety_effect},
      {"importance sampling unbiasedness", importance_sampling},
      {"cross-entropy effectiveness", cross_entropy},
      {"coordination safety", coordination},
      {"multithreat fusion", fusion},
      {"CPT recovery", cpt_recovery},
      {"table file round trip", table_round_trip},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += r.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, criteria[i].first, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
