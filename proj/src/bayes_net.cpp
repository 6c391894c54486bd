#include "cas/bayes_net.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cas {

namespace {

void validate_row(const std::vector<double>& row, std::size_t bins, const std::string& name) {
  if (row.size() != bins) throw std::invalid_argument("cpt '" + name + "': row width != bins");
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("cpt '" + name + "': invalid probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kRowTolerance) {
    throw std::invalid_argument("cpt '" + name + "': row does not sum to 1");
  }
}

}  // namespace

DiscreteBayesNet::DiscreteBayesNet(std::vector<BayesNode> nodes) : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.name.empty()) throw std::invalid_argument("bayes net: unnamed node");
    for (std::size_t j = 0; j < i; ++j) {
      if (nodes_[j].name == n.name) throw std::invalid_argument("bayes net: duplicate " + n.name);
    }
    if (n.edges.size() < 2) throw std::invalid_argument("bayes net: '" + n.name + "' has no bins");
    for (std::size_t k = 1; k < n.edges.size(); ++k) {
      if (!(n.edges[k] > n.edges[k - 1])) {
        throw std::invalid_argument("bayes net: '" + n.name + "' cut points not increasing");
      }
    }
    for (std::size_t p : n.parents) {
      if (p >= i) throw std::invalid_argument("bayes net: '" + n.name + "' parent not earlier");
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.cpt.empty()) continue;
    if (n.cpt.size() != row_count(i)) {
      throw std::invalid_argument("cpt '" + n.name + "': row count != parent configurations");
    }
    for (const auto& row : n.cpt) validate_row(row, n.bins(), n.name);
  }
}

std::optional<std::size_t> DiscreteBayesNet::find(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t DiscreteBayesNet::row_count(std::size_t node) const {
  std::size_t rows = 1;
  for (std::size_t p : nodes_.at(node).parents) rows *= nodes_[p].bins();
  return rows;
}

std::size_t DiscreteBayesNet::row_index(std::size_t node, std::span<const int> bins) const {
  std::size_t row = 0;
  for (std::size_t p : nodes_.at(node).parents) {
    const int b = bins[p];
    if (b < 0 || static_cast<std::size_t>(b) >= nodes_[p].bins()) {
      throw std::out_of_range("bayes net: parent bin out of range");
    }
    row = row * nodes_[p].bins() + static_cast<std::size_t>(b);
  }
  return row;
}

bool DiscreteBayesNet::fitted() const {
  if (nodes_.empty()) return false;
  return std::all_of(nodes_.begin(), nodes_.end(), [](const BayesNode& n) { return !n.cpt.empty(); });
}

void DiscreteBayesNet::require_fitted() const {
  if (!fitted()) throw std::invalid_argument("bayes net: CPTs not fitted");
}

int DiscreteBayesNet::bin_of(std::size_t node, double value) const {
  const auto& e = nodes_.at(node).edges;
  const auto it = std::upper_bound(e.begin(), e.end(), value);
  const long idx = static_cast<long>(it - e.begin()) - 1;
  return static_cast<int>(std::clamp<long>(idx, 0, static_cast<long>(e.size()) - 2));
}

double DiscreteBayesNet::probability(std::size_t node, std::span<const int> bins) const {
  const auto& n = nodes_.at(node);
  const int b = bins[node];
  if (b < 0 || static_cast<std::size_t>(b) >= n.bins()) {
    throw std::out_of_range("bayes net: bin out of range");
  }
  return n.cpt.at(row_index(node, bins))[static_cast<std::size_t>(b)];
}

DiscreteBayesNet DiscreteBayesNet::structure() const {
  auto nodes = nodes_;
  for (auto& n : nodes) n.cpt.clear();
  return DiscreteBayesNet(std::move(nodes));
}

DiscreteBayesNet DiscreteBayesNet::with_cpts(std::vector<std::vector<std::vector<double>>> cpts) const {
  if (cpts.size() != nodes_.size()) throw std::invalid_argument("bayes net: cpt count mismatch");
  auto nodes = nodes_;
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].cpt = std::move(cpts[i]);
  return DiscreteBayesNet(std::move(nodes));
}

DiscreteBayesNet fit_cpts(const DiscreteBayesNet& structure,
                          std::span<const std::vector<int>> data, double prior_count) {
  if (structure.size() == 0) throw std::invalid_argument("fit_cpts: empty structure");
  if (!(prior_count >= 0.0) || !std::isfinite(prior_count)) {
    throw std::invalid_argument("fit_cpts: prior count must be finite and non-negative");
  }
  std::vector<std::vector<std::vector<double>>> counts(structure.size());
  for (std::size_t i = 0; i < structure.size(); ++i) {
    counts[i].assign(structure.row_count(i), std::vector<double>(structure.node(i).bins(), 0.0));
  }
  for (const auto& row : data) {
    if (row.size() != structure.size()) throw std::invalid_argument("fit_cpts: column mismatch");
    for (std::size_t i = 0; i < structure.size(); ++i) {
      if (row[i] < 0 || static_cast<std::size_t>(row[i]) >= structure.node(i).bins()) {
        throw std::invalid_argument("fit_cpts: bin out of range for '" + structure.node(i).name + "'");
      }
    }
    for (std::size_t i = 0; i < structure.size(); ++i) {
      counts[i][structure.row_index(i, row)][static_cast<std::size_t>(row[i])] += 1.0;
    }
  }
  for (auto& node_counts : counts) {
    for (auto& cells : node_counts) {
      double total = 0.0;
      for (double& c : cells) {
        c += prior_count;
        total += c;
      }
      for (double& c : cells) c = total > 0.0 ? c / total : 1.0 / static_cast<double>(cells.size());
    }
  }
  return structure.with_cpts(std::move(counts));
}

std::pair<int, double> sample_bin(const DiscreteBayesNet& net, std::size_t node,
                                  std::span<const int> bins, Rng& rng) {
  const auto& row = net.node(node).cpt.at(net.row_index(node, bins));
  const double u = uniform01(rng);
  double cumulative = 0.0;
  int chosen = -1;
  for (std::size_t k = 0; k < row.size(); ++k) {
    cumulative += row[k];
    if (u < cumulative && row[k] > 0.0) {
      chosen = static_cast<int>(k);
      break;
    }
  }
  if (chosen < 0) {
    // rounding left u above the cumulative sum: take the last bin with mass
    for (std::size_t k = row.size(); k-- > 0;) {
      if (row[k] > 0.0) {
        chosen = static_cast<int>(k);
        break;
      }
    }
  }
  return {chosen, std::log(row[static_cast<std::size_t>(chosen)])};
}

double sample_in_bin(const BayesNode& node, int bin, Rng& rng) {
  const double lo = node.edges.at(static_cast<std::size_t>(bin));
  const double hi = node.edges.at(static_cast<std::size_t>(bin) + 1);
  return lo + (hi - lo) * uniform01(rng);
}

std::vector<std::vector<int>> read_binned_csv(std::istream& in,
                                              const std::vector<std::string>& expected_names) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
    break;
  }
  if (header.empty()) throw std::invalid_argument("binned csv: missing header");
  std::vector<std::size_t> column_of(expected_names.size());
  for (std::size_t i = 0; i < expected_names.size(); ++i) {
    const auto it = std::find(header.begin(), header.end(), expected_names[i]);
    if (it == header.end()) throw std::invalid_argument("binned csv: missing column " + expected_names[i]);
    column_of[i] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::vector<int>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<int> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      std::size_t used = 0;
      const int v = std::stoi(field, &used);
      if (used != field.size()) throw std::invalid_argument("binned csv: bad integer '" + field + "'");
      fields.push_back(v);
    }
    if (fields.size() != header.size()) throw std::invalid_argument("binned csv: ragged row");
    std::vector<int> row(expected_names.size());
    for (std::size_t i = 0; i < expected_names.size(); ++i) row[i] = fields[column_of[i]];
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_binned_csv(std::ostream& out, const std::vector<std::string>& names,
                      std::span<const std::vector<int>> rows) {
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace cas
