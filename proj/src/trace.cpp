#include "cas/trace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cas {

bool EncounterTrace::any(EventFlag flag) const {
  for (auto e : events) {
    if (e & flag) return true;
  }
  return false;
}

void EncounterTrace::validate() const {
  const std::size_t n = ownship.size();
  if (intruder.size() != n || own_advisories.size() != n || intruder_advisories.size() != n ||
      events.size() != n) {
    throw std::invalid_argument("trace: series lengths differ");
  }
  if (ownship.dt != dt || intruder.dt != dt || !(dt > 0.0)) {
    throw std::invalid_argument("trace: inconsistent time step");
  }
}

VerticalState vertical_state_of(const AircraftState& own, const AircraftState& intruder,
                                Advisory a_prev, double separation_threshold, int tau_max) {
  VerticalState s;
  s.h = intruder.position.z() - own.position.z();
  s.hdot0 = own.velocity.z();
  s.hdot1 = intruder.velocity.z();
  s.a_prev = a_prev;
  const auto tau = horizontal_tau(own, intruder, separation_threshold);
  s.tau = tau ? static_cast<int>(std::min<long>(std::lround(*tau), tau_max)) : tau_max;
  return s;
}

VerticalState vertical_state_of(const EncounterTrace& trace, std::size_t step, Advisory a_prev,
                                double separation_threshold, int tau_max) {
  if (step >= trace.size() || step >= trace.intruder.size()) {
    throw std::out_of_range("vertical_state_of: step out of range");
  }
  return vertical_state_of(trace.ownship.states[step], trace.intruder.states[step], a_prev,
                           separation_threshold, tau_max);
}

namespace {

constexpr std::array<std::pair<EventFlag, std::string_view>, 6> kEventNames = {{
    {kEventTA, "TA"},
    {kEventRA, "RA"},
    {kEventStrengthen, "STRENGTHEN"},
    {kEventReversal, "REVERSAL"},
    {kEventCrossing, "CROSSING"},
    {kEventNMAC, "NMAC"},
}};

void put_number(std::ostream& out, double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.write(buf, end - buf);
}

double parse_number(const std::string& field) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::invalid_argument("trace csv: bad number '" + field + "'");
  }
  return value;
}

constexpr std::string_view kHeader =
    "t,x0,y0,z0,vx0,vy0,vz0,x1,y1,z1,vx1,vy1,vz1,adv0,adv1,events";

}  // namespace

std::string format_events(std::uint8_t flags) {
  std::string out;
  for (auto [flag, name] : kEventNames) {
    if (flags & flag) {
      if (!out.empty()) out += '|';
      out += name;
    }
  }
  return out.empty() ? "-" : out;
}

std::uint8_t parse_events(const std::string& text) {
  if (text == "-" || text.empty()) return 0;
  std::uint8_t flags = 0;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, '|')) {
    bool found = false;
    for (auto [flag, name] : kEventNames) {
      if (token == name) {
        flags |= flag;
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("trace csv: unknown event '" + token + "'");
  }
  return flags;
}

void write_trace_csv(std::ostream& out, const EncounterTrace& trace) {
  trace.validate();
  out << "# dt=";
  put_number(out, trace.dt);
  out << '\n' << kHeader << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    put_number(out, static_cast<double>(k) * trace.dt);
    for (const auto* track : {&trace.ownship, &trace.intruder}) {
      const auto& s = track->states[k];
      for (int i = 0; i < 3; ++i) {
        out << ',';
        put_number(out, s.position[i]);
      }
      for (int i = 0; i < 3; ++i) {
        out << ',';
        put_number(out, s.velocity[i]);
      }
    }
    out << ',' << name_of(trace.own_advisories[k]) << ',' << name_of(trace.intruder_advisories[k])
        << ',' << format_events(trace.events[k]) << '\n';
  }
}

EncounterTrace read_trace_csv(std::istream& in) {
  EncounterTrace trace;
  std::string line;
  bool have_dt = false;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#", 0) == 0) {
      const auto pos = line.find("dt=");
      if (pos != std::string::npos) {
        trace.dt = parse_number(line.substr(pos + 3));
        have_dt = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != kHeader) throw std::invalid_argument("trace csv: unexpected header");
      have_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 16) throw std::invalid_argument("trace csv: expected 16 columns");
    AircraftState own, intr;
    for (int i = 0; i < 3; ++i) {
      own.position[i] = parse_number(fields[1 + i]);
      own.velocity[i] = parse_number(fields[4 + i]);
      intr.position[i] = parse_number(fields[7 + i]);
      intr.velocity[i] = parse_number(fields[10 + i]);
    }
    const auto a0 = advisory_from_name(fields[13]);
    const auto a1 = advisory_from_name(fields[14]);
    if (!a0 || !a1) throw std::invalid_argument("trace csv: unknown advisory");
    trace.ownship.states.push_back(own);
    trace.intruder.states.push_back(intr);
    trace.own_advisories.push_back(*a0);
    trace.intruder_advisories.push_back(*a1);
    trace.events.push_back(parse_events(fields[15]));
  }
  if (!have_dt) throw std::invalid_argument("trace csv: missing '# dt=' line");
  trace.ownship.dt = trace.intruder.dt = trace.dt;
  trace.validate();
  return trace;
}

}  // namespace cas
