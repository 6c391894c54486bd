#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cas/random.hpp"

namespace cas {

/// One discrete variable. Bin k covers [edges[k], edges[k+1]).
struct BayesNode {
  std::string name;
  std::vector<std::size_t> parents;          // indices of earlier nodes
  std::vector<double> edges;                 // strictly increasing, size = bins + 1
  std::vector<std::vector<double>> cpt;      // one row per joint parent-bin assignment

  std::size_t bins() const { return edges.empty() ? 0 : edges.size() - 1; }
};

/// Discrete Bayesian network with nodes stored in topological order.
class DiscreteBayesNet {
 public:
  DiscreteBayesNet() = default;
  /// Validates structure (acyclic parent order, edges) and any CPTs present.
  explicit DiscreteBayesNet(std::vector<BayesNode> nodes);

  const std::vector<BayesNode>& nodes() const { return nodes_; }
  const BayesNode& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  std::optional<std::size_t> find(const std::string& name) const;

  /// Product of parent bin counts.
  std::size_t row_count(std::size_t node) const;
  /// Mixed-radix row index; the first parent is the most significant digit.
  std::size_t row_index(std::size_t node, std::span<const int> bins) const;
  /// True when every node carries a full normalized CPT.
  bool fitted() const;
  /// Throws std::invalid_argument unless fitted().
  void require_fitted() const;

  int bin_of(std::size_t node, double value) const;
  double probability(std::size_t node, std::span<const int> bins) const;

  /// Copy with all CPTs removed.
  DiscreteBayesNet structure() const;
  /// Replaces the CPTs; validates them.
  DiscreteBayesNet with_cpts(std::vector<std::vector<std::vector<double>>> cpts) const;

 private:
  std::vector<BayesNode> nodes_;
};

inline constexpr double kRowTolerance = 1e-9;

/// Dirichlet-smoothed maximum likelihood: cell = (count + prior) / (row_total + prior * bins).
/// A row with no data and zero prior becomes uniform.
/// `data` rows hold one bin index per node. Throws std::invalid_argument on mismatch.
DiscreteBayesNet fit_cpts(const DiscreteBayesNet& structure,
                          std::span<const std::vector<int>> data, double prior_count);

/// Draws a bin from the node's CPT row given the parents' bins; returns (bin, log-probability).
std::pair<int, double> sample_bin(const DiscreteBayesNet& net, std::size_t node,
                                  std::span<const int> bins, Rng& rng);

/// Uniform value within a bin.
double sample_in_bin(const BayesNode& node, int bin, Rng& rng);

/// Binned sample table: header of node names, one row of integer bins per line.
std::vector<std::vector<int>> read_binned_csv(std::istream& in,
                                              const std::vector<std::string>& expected_names);
void write_binned_csv(std::ostream& out, const std::vector<std::string>& names,
                      std::span<const std::vector<int>> rows);

}  // namespace cas
