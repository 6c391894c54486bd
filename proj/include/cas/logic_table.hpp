#pragma once

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <vector>

#include "cas/advisory.hpp"
#include "cas/geometry.hpp"

namespace cas {

/// Expected value per advisory, indexed by index_of(Advisory).
template <typename Scalar>
using ActionValuesT = Eigen::Matrix<Scalar, static_cast<int>(kNumAdvisories), 1>;
using ActionValues = ActionValuesT<double>;

/// Highest-valued advisory; ties go to the earliest entry of kTieBreakOrder.
template <typename Derived>
Advisory argmax_advisory(const Eigen::MatrixBase<Derived>& values) {
  Advisory best = kTieBreakOrder.front();
  for (Advisory a : kTieBreakOrder) {
    if (values(index_of(a)) > values(index_of(best))) best = a;
  }
  return best;
}

/// Lower bracketing index and the weight of the upper neighbour, after clamping to the axis.
struct Bracket {
  std::size_t lower = 0;
  double upper_weight = 0.0;
};
Bracket bracket(const std::vector<double>& axis, double x);

/// Discretized vertical state space. Rates are in ft/s; tau runs 0..tau_max in 1 s steps.
class Grid {
 public:
  Grid(std::vector<double> h, std::vector<double> hdot0, std::vector<double> hdot1, int tau_max);

  const std::vector<double>& h() const { return h_; }
  const std::vector<double>& hdot0() const { return hdot0_; }
  const std::vector<double>& hdot1() const { return hdot1_; }
  int tau_max() const { return tau_max_; }

  /// Vertices of the (h, hdot0, hdot1) lattice.
  std::size_t vertex_count() const { return h_.size() * hdot0_.size() * hdot1_.size(); }
  std::size_t vertex_index(std::size_t ih, std::size_t i0, std::size_t i1) const {
    return (ih * hdot0_.size() + i0) * hdot1_.size() + i1;
  }
  /// States per tau layer: every a_prev at every vertex.
  std::size_t layer_size() const { return kNumAdvisories * vertex_count(); }
  std::size_t state_count() const { return static_cast<std::size_t>(tau_max_ + 1) * layer_size(); }
  /// Row-major over (tau, a_prev, h, hdot0, hdot1).
  std::size_t state_index(int tau, Advisory a_prev, std::size_t vertex) const {
    return (static_cast<std::size_t>(tau) * kNumAdvisories + index_of(a_prev)) * vertex_count() + vertex;
  }
  VerticalState state_at(std::size_t index) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<double> h_, hdot0_, hdot1_;
  int tau_max_;
};

/// h within +/-4000 ft (33 points, denser near 0), rates within +/-2500 ft/min (13 points),
/// tau 0..40 s.
Grid default_grid();

/// Optimized state-action values over a Grid, one column per grid state.
class LogicTable {
 public:
  using Matrix = Eigen::Matrix<double, static_cast<int>(kNumAdvisories), Eigen::Dynamic>;

  LogicTable(Grid grid, Matrix values);

  const Grid& grid() const { return grid_; }
  const Matrix& values() const { return values_; }
  const std::array<Advisory, kNumAdvisories>& advisories() const { return kAllAdvisories; }

  auto state_values(std::size_t state) const { return values_.col(static_cast<Eigen::Index>(state)); }
  double value(std::size_t state, Advisory a) const {
    return values_(static_cast<Eigen::Index>(index_of(a)), static_cast<Eigen::Index>(state));
  }

 private:
  Grid grid_;
  Matrix values_;
};

/// `ACXT` binary format, little-endian: magic, u32 version, u32 dimension count, per dimension
/// (tau, h, hdot0, hdot1) a u32 count and f64 cut points, u32 advisory count and
/// length-prefixed names, u64 value count and f32 values ordered
/// (tau, a_prev, h, hdot0, hdot1, advisory).
void write_table(std::ostream& out, const LogicTable& table);
LogicTable read_table(std::istream& in);

inline constexpr std::uint32_t kTableFormatVersion = 1;

}  // namespace cas
