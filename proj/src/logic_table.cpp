#include "cas/logic_table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cas {

Bracket bracket(const std::vector<double>& axis, double x) {
  if (axis.size() == 1) return {0, 0.0};
  if (x <= axis.front()) return {0, 0.0};
  if (x >= axis.back()) return {axis.size() - 2, 1.0};
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  const std::size_t lower = static_cast<std::size_t>(it - axis.begin()) - 1;
  const double span = axis[lower + 1] - axis[lower];
  return {lower, (x - axis[lower]) / span};
}

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw std::invalid_argument(std::string("grid: empty axis ") + name);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) throw std::invalid_argument(std::string("grid: non-finite ") + name);
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw std::invalid_argument(std::string("grid: cut points not increasing in ") + name);
    }
  }
}

}  // namespace

Grid::Grid(std::vector<double> h, std::vector<double> hdot0, std::vector<double> hdot1, int tau_max)
    : h_(std::move(h)), hdot0_(std::move(hdot0)), hdot1_(std::move(hdot1)), tau_max_(tau_max) {
  check_axis(h_, "h");
  check_axis(hdot0_, "hdot0");
  check_axis(hdot1_, "hdot1");
  for (std::size_t i = 0; i < h_.size(); ++i) {
    if (std::abs(h_[i] + h_[h_.size() - 1 - i]) > 1e-9) {
      throw std::invalid_argument("grid: h cut points must be symmetric about 0");
    }
  }
  if (tau_max_ < 0) throw std::invalid_argument("grid: negative tau_max");
}

VerticalState Grid::state_at(std::size_t index) const {
  if (index >= state_count()) throw std::out_of_range("grid: state index out of range");
  std::size_t vertex = index % vertex_count();
  const std::size_t rest = index / vertex_count();
  VerticalState s;
  s.a_prev = kAllAdvisories[rest % kNumAdvisories];
  s.tau = static_cast<int>(rest / kNumAdvisories);
  const std::size_t i1 = vertex % hdot1_.size();
  vertex /= hdot1_.size();
  const std::size_t i0 = vertex % hdot0_.size();
  const std::size_t ih = vertex / hdot0_.size();
  s.h = h_[ih];
  s.hdot0 = hdot0_[i0];
  s.hdot1 = hdot1_[i1];
  return s;
}

Grid default_grid() {
  const std::vector<double> positive_h = {50,  100, 150,  200,  300,  400,  500,  600,
                                          800, 1000, 1300, 1600, 2000, 2500, 3200, 4000};
  std::vector<double> h;
  for (auto it = positive_h.rbegin(); it != positive_h.rend(); ++it) h.push_back(-*it);
  h.push_back(0.0);
  h.insert(h.end(), positive_h.begin(), positive_h.end());

  const std::vector<double> positive_fpm = {250, 500, 1000, 1500, 2000, 2500};
  std::vector<double> rates;
  for (auto it = positive_fpm.rbegin(); it != positive_fpm.rend(); ++it) rates.push_back(-*it * kFeetPerMinute);
  rates.push_back(0.0);
  for (double r : positive_fpm) rates.push_back(r * kFeetPerMinute);
  return Grid(h, rates, rates, 40);
}

LogicTable::LogicTable(Grid grid, Matrix values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.cols()) != grid_.state_count()) {
    throw std::invalid_argument("logic table: value count does not match grid");
  }
  if (!values_.allFinite()) throw std::invalid_argument("logic table: non-finite values");
}

// ---------------------------------------------------------------------------
// ACXT serialization

namespace {

constexpr char kMagic[4] = {'A', 'C', 'X', 'T'};

template <typename UInt>
void put_le(std::ostream& out, UInt v) {
  char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, sizeof bytes);
}

template <typename UInt>
UInt get_le(std::istream& in) {
  unsigned char bytes[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof bytes)) {
    throw std::invalid_argument("table file: truncated");
  }
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

void put_axis(std::ostream& out, const std::vector<double>& axis) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(axis.size()));
  for (double x : axis) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
}

std::vector<double> get_axis(std::istream& in) {
  const auto n = get_le<std::uint32_t>(in);
  if (n > (1u << 24)) throw std::invalid_argument("table file: implausible axis length");
  std::vector<double> axis(n);
  for (auto& x : axis) x = std::bit_cast<double>(get_le<std::uint64_t>(in));
  return axis;
}

}  // namespace

void write_table(std::ostream& out, const LogicTable& table) {
  const Grid& g = table.grid();
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kTableFormatVersion);
  put_le<std::uint32_t>(out, 4);
  std::vector<double> tau(static_cast<std::size_t>(g.tau_max() + 1));
  for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = static_cast<double>(i);
  put_axis(out, tau);
  put_axis(out, g.h());
  put_axis(out, g.hdot0());
  put_axis(out, g.hdot1());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kNumAdvisories));
  for (Advisory a : kAllAdvisories) {
    const auto name = name_of(a);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  const auto& values = table.values();
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(values.data()[i])));
  }
  if (!out) throw std::runtime_error("table file: write failed");
}

LogicTable read_table(std::istream& in) {
  char magic[4];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::invalid_argument("table file: bad magic");
  }
  if (get_le<std::uint32_t>(in) != kTableFormatVersion) {
    throw std::invalid_argument("table file: unsupported version");
  }
  if (get_le<std::uint32_t>(in) != 4) throw std::invalid_argument("table file: expected 4 dimensions");
  const auto tau = get_axis(in);
  auto h = get_axis(in);
  auto hdot0 = get_axis(in);
  auto hdot1 = get_axis(in);
  if (tau.empty()) throw std::invalid_argument("table file: empty tau axis");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] != static_cast<double>(i)) throw std::invalid_argument("table file: tau axis must be 0..max");
  }
  if (get_le<std::uint32_t>(in) != kNumAdvisories) {
    throw std::invalid_argument("table file: advisory set mismatch");
  }
  for (Advisory a : kAllAdvisories) {
    const auto len = get_le<std::uint32_t>(in);
    if (len > 64) throw std::invalid_argument("table file: advisory name too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw std::invalid_argument("table file: truncated");
    if (name != name_of(a)) throw std::invalid_argument("table file: unexpected advisory " + name);
  }
  Grid grid(std::move(h), std::move(hdot0), std::move(hdot1), static_cast<int>(tau.size()) - 1);
  const auto count = get_le<std::uint64_t>(in);
  if (count != grid.state_count() * kNumAdvisories) {
    throw std::invalid_argument("table file: value count does not match grid");
  }
  LogicTable::Matrix values(static_cast<Eigen::Index>(kNumAdvisories),
                            static_cast<Eigen::Index>(grid.state_count()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values.data()[i] = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in)));
  }
  return LogicTable(std::move(grid), std::move(values));
}

}  // namespace cas
