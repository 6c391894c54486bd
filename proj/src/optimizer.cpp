#include "cas/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cas/parallel.hpp"

namespace cas {

void RewardParams::validate() const {
  for (double c : {collision_cost, alert_cost, strengthen_cost, reversal_cost}) {
    if (!std::isfinite(c) || c > 0.0) throw std::invalid_argument("reward: costs must be finite and <= 0");
  }
  if (!(nmac_vertical > 0.0)) throw std::invalid_argument("reward: nmac_vertical must be positive");
}

double reward(const VerticalState& s, Advisory a, const RewardParams& params) {
  double r = 0.0;
  if (s.tau == 0 && std::abs(s.h) < params.nmac_vertical) r += params.collision_cost;
  if (a != Advisory::COC && s.a_prev == Advisory::COC) r += params.alert_cost;
  if (is_strengthening(s.a_prev, a)) r += params.strengthen_cost;
  if (is_reversal(s.a_prev, a)) r += params.reversal_cost;
  return r;
}

namespace {

struct Outcome {
  double h, hdot0, hdot1, probability;
};

/// Continuous one-second successors of a vertex under advisory `a`.
int successors(double h, double hdot0, double hdot1, Advisory a, Advisory a_prev,
               const DynamicsModels& models, std::array<Outcome, 6>& out) {
  const auto band = rate_band(a);
  const double respond =
      a == Advisory::COC ? 0.0 : (a == a_prev ? 1.0 : models.pilot.response_probability);
  const double spread = std::sqrt(3.0) * models.intruder.sigma_accel;
  constexpr std::array<double, 3> kSigmaWeights = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
  const std::array<double, 3> accelerations = {-spread, 0.0, spread};

  int n = 0;
  for (int complying = 0; complying < 2; ++complying) {
    const double p_pilot = complying ? respond : 1.0 - respond;
    if (p_pilot <= 0.0) continue;
    const auto own = step_vertical({0.0, hdot0}, band, complying == 1, models.pilot, 1.0);
    for (std::size_t k = 0; k < 3; ++k) {
      if (spread == 0.0 && k != 1) continue;
      const double w = spread == 0.0 ? 1.0 : kSigmaWeights[k];
      const double hdot1_next = hdot1 + accelerations[k];
      const double intruder_dz = 0.5 * (hdot1 + hdot1_next);
      out[static_cast<std::size_t>(n++)] = {h + intruder_dz - own.z, own.vz, hdot1_next, p_pilot * w};
    }
  }
  return n;
}

/// Multilinear weights of a continuous (h, hdot0, hdot1) point on the lattice.
template <typename Visit>
void for_each_vertex(const Grid& grid, double h, double hdot0, double hdot1, double mass, Visit&& visit) {
  const Bracket bh = bracket(grid.h(), h);
  const Bracket b0 = bracket(grid.hdot0(), hdot0);
  const Bracket b1 = bracket(grid.hdot1(), hdot1);
  for (int dh = 0; dh < 2; ++dh) {
    const double wh = dh ? bh.upper_weight : 1.0 - bh.upper_weight;
    if (wh == 0.0) continue;
    for (int d0 = 0; d0 < 2; ++d0) {
      const double w0 = d0 ? b0.upper_weight : 1.0 - b0.upper_weight;
      if (w0 == 0.0) continue;
      for (int d1 = 0; d1 < 2; ++d1) {
        const double w1 = d1 ? b1.upper_weight : 1.0 - b1.upper_weight;
        if (w1 == 0.0) continue;
        visit(grid.vertex_index(bh.lower + static_cast<std::size_t>(dh), b0.lower + static_cast<std::size_t>(d0),
                                b1.lower + static_cast<std::size_t>(d1)),
              mass * wh * w0 * w1);
      }
    }
  }
}

}  // namespace

std::vector<WeightedState> transition_distribution(const VerticalState& s, Advisory a,
                                                   const DynamicsModels& models, const Grid& grid) {
  if (s.tau <= 0) throw std::invalid_argument("transition_distribution: terminal state (tau = 0)");
  if (s.tau > grid.tau_max()) throw std::out_of_range("transition_distribution: tau beyond grid");
  std::array<Outcome, 6> outcomes;
  const int n = successors(s.h, s.hdot0, s.hdot1, a, s.a_prev, models, outcomes);
  std::vector<WeightedState> result;
  for (int i = 0; i < n; ++i) {
    const auto& o = outcomes[static_cast<std::size_t>(i)];
    for_each_vertex(grid, o.h, o.hdot0, o.hdot1, o.probability, [&](std::size_t vertex, double w) {
      result.push_back({grid.state_index(s.tau - 1, a, vertex), w});
    });
  }
  std::sort(result.begin(), result.end(), [](const auto& x, const auto& y) { return x.index < y.index; });
  std::vector<WeightedState> merged;
  for (const auto& ws : result) {
    if (!merged.empty() && merged.back().index == ws.index) {
      merged.back().weight += ws.weight;
    } else {
      merged.push_back(ws);
    }
  }
  return merged;
}

LogicTable backward_induction(const Grid& grid, const DynamicsModels& models,
                              const RewardParams& params, unsigned workers) {
  params.validate();
  models.pilot.validate();
  models.intruder.validate();

  const std::size_t vertices = grid.vertex_count();
  const std::size_t layer = grid.layer_size();
  LogicTable::Matrix q(static_cast<Eigen::Index>(kNumAdvisories),
                       static_cast<Eigen::Index>(grid.state_count()));

  // Terminal layer.
  for (std::size_t s = 0; s < layer; ++s) {
    const VerticalState state = grid.state_at(s);
    for (Advisory a : kAllAdvisories) q(index_of(a), static_cast<Eigen::Index>(s)) = reward(state, a, params);
  }

  // best[a_prev * vertices + v]: max over actions in the previous layer.
  std::vector<double> best(layer);
  for (int tau = 1; tau <= grid.tau_max(); ++tau) {
    const std::size_t prev_offset = static_cast<std::size_t>(tau - 1) * layer;
    const std::size_t offset = static_cast<std::size_t>(tau) * layer;
    for (std::size_t s = 0; s < layer; ++s) {
      best[s] = q.col(static_cast<Eigen::Index>(prev_offset + s)).maxCoeff();
    }

    parallel_for(vertices, workers, [&](std::size_t begin, std::size_t end) {
      std::array<Outcome, 6> outcomes;
      for (std::size_t v = begin; v < end; ++v) {
        const VerticalState vertex_state = grid.state_at(v);
        // expected continuation for each action, split by whether the advisory is new
        ActionValues continuation_new = ActionValues::Zero();
        ActionValues continuation_kept = ActionValues::Zero();
        for (Advisory a : kAllAdvisories) {
          for (int kept = 0; kept < 2; ++kept) {
            if (a == Advisory::COC && kept) continue;
            const Advisory a_prev = kept ? a : Advisory::COC;
            const int n = successors(vertex_state.h, vertex_state.hdot0, vertex_state.hdot1, a,
                                     a_prev, models, outcomes);
            double expected = 0.0;
            for (int i = 0; i < n; ++i) {
              const auto& o = outcomes[static_cast<std::size_t>(i)];
              for_each_vertex(grid, o.h, o.hdot0, o.hdot1, o.probability, [&](std::size_t vertex, double w) {
                expected += w * best[index_of(a) * vertices + vertex];
              });
            }
            (kept ? continuation_kept : continuation_new)(index_of(a)) = expected;
          }
        }
        continuation_kept(index_of(Advisory::COC)) = continuation_new(index_of(Advisory::COC));

        for (Advisory a_prev : kAllAdvisories) {
          VerticalState s = vertex_state;
          s.a_prev = a_prev;
          s.tau = tau;
          const auto col = static_cast<Eigen::Index>(offset + index_of(a_prev) * vertices + v);
          for (Advisory a : kAllAdvisories) {
            const double continuation =
                a == a_prev ? continuation_kept(index_of(a)) : continuation_new(index_of(a));
            q(index_of(a), col) = reward(s, a, params) + continuation;
          }
        }
      }
    });
    if (!q.middleCols(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(layer)).allFinite()) {
      throw std::overflow_error("backward_induction: non-finite value in layer " + std::to_string(tau));
    }
  }
  return LogicTable(grid, std::move(q));
}

namespace {

std::size_t grid_position(const std::vector<double>& axis, double value, const char* name) {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (std::abs(axis[i] - value) <= 1e-9 * std::max(1.0, std::abs(value))) return i;
  }
  throw std::out_of_range(std::string("policy_slice: ") + name + " is not a grid value");
}

}  // namespace

PolicySlice policy_slice(const LogicTable& table, double hdot0, double hdot1, Advisory a_prev) {
  const Grid& g = table.grid();
  const std::size_t i0 = grid_position(g.hdot0(), hdot0, "hdot0");
  const std::size_t i1 = grid_position(g.hdot1(), hdot1, "hdot1");
  PolicySlice slice;
  slice.h = g.h();
  slice.tau_max = g.tau_max();
  for (int tau = 0; tau <= g.tau_max(); ++tau) {
    for (std::size_t ih = 0; ih < g.h().size(); ++ih) {
      const std::size_t state = g.state_index(tau, a_prev, g.vertex_index(ih, i0, i1));
      slice.cells.push_back(argmax_advisory(table.state_values(state)));
    }
  }
  return slice;
}

void write_slice_csv(std::ostream& out, const PolicySlice& slice, bool sense_labels) {
  out << "tau";
  for (double h : slice.h) out << ',' << h;
  out << '\n';
  for (int tau = 0; tau <= slice.tau_max; ++tau) {
    out << tau;
    for (std::size_t ih = 0; ih < slice.h.size(); ++ih) {
      const Advisory a = slice.at(tau, ih);
      out << ',' << (sense_labels ? name_of(sense_of(a)) : name_of(a));
    }
    out << '\n';
  }
}

}  // namespace cas
