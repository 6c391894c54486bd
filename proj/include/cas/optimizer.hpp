#pragma once

#include <vector>

#include "cas/dynamics.hpp"
#include "cas/logic_table.hpp"

namespace cas {

/// Non-positive rewards. The collision cost applies at tau = 0 when |h| < nmac_vertical.
struct RewardParams {
  double collision_cost = -1.0;
  double alert_cost = -0.01;
  double strengthen_cost = -0.005;
  double reversal_cost = -0.02;
  double nmac_vertical = kNmacVertical;

  void validate() const;
};

struct DynamicsModels {
  PilotModel pilot;
  IntruderModel intruder;
};

struct WeightedState {
  std::size_t index = 0;  // Grid::state_index
  double weight = 0.0;
};

/// Next-state distribution on grid vertices after one second. The pilot of a newly issued
/// advisory responds with the model's probability, a continued advisory is followed; the
/// intruder acceleration takes the 3-point Gaussian quadrature. Throws for tau = 0.
std::vector<WeightedState> transition_distribution(const VerticalState& s, Advisory a,
                                                   const DynamicsModels& models, const Grid& grid);

double reward(const VerticalState& s, Advisory a, const RewardParams& params);

/// Finite-horizon value of every (state, advisory) pair, solved layer by layer from tau = 0.
/// `workers` > 1 splits each layer across threads; results do not depend on it.
LogicTable backward_induction(const Grid& grid, const DynamicsModels& models,
                              const RewardParams& params, unsigned workers = 1);

/// Optimal advisory over (tau, h) with the other state variables held at grid values.
struct PolicySlice {
  std::vector<double> h;
  int tau_max = 0;
  std::vector<Advisory> cells;  // row-major, row = tau

  Advisory at(int tau, std::size_t ih) const {
    return cells[static_cast<std::size_t>(tau) * h.size() + ih];
  }
};

/// Throws std::out_of_range if a fixed value is not a grid point.
PolicySlice policy_slice(const LogicTable& table, double hdot0, double hdot1, Advisory a_prev);

/// CSV matrix: header `tau,<h...>`, one row per tau with sense (COC/up/down) or advisory labels.
void write_slice_csv(std::ostream& out, const PolicySlice& slice, bool sense_labels = true);

}  // namespace cas
