#include "cas/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cas/parallel.hpp"

namespace cas {

EncounterOutcome summarize_trace(const EncounterTrace& trace) {
  EncounterOutcome o;
  o.nmac = trace.any(kEventNMAC);
  o.alert = trace.any(kEventRA);
  o.strengthen = trace.any(kEventStrengthen);
  o.reversal = trace.any(kEventReversal);
  o.crossing = trace.any(kEventCrossing);
  o.min_separation = min_scaled_separation(trace);
  return o;
}

namespace {

struct Sampled {
  SampledEncounter encounter;
  EncounterTrace trace;
};

Sampled sample_and_run(const EncounterModel& model, const Equipage& eq, std::uint64_t seed,
                       std::uint64_t index, const PlacementOptions& placement) {
  Rng encounter_rng = make_stream(seed, Stream::Encounter, index);
  Rng pilot_rng = make_stream(seed, Stream::Pilot, index);
  Rng belief_rng = make_stream(seed, Stream::Belief, index);
  Sampled s{build_encounter(model, encounter_rng, placement), {}};
  s.trace = simulate_encounter(s.encounter, eq, pilot_rng, belief_rng);
  return s;
}

/// Runs indices [first, first + n) and reweights each against `nominal` when given.
std::vector<EncounterOutcome> run_batch(const EncounterModel& sampler, const EncounterModel* nominal,
                                        const Equipage& eq, std::uint64_t n, std::uint64_t seed,
                                        std::uint64_t first, const EvaluationOptions& options,
                                        std::vector<EncounterData>* data = nullptr) {
  std::vector<EncounterOutcome> out(n);
  if (data) data->assign(n, EncounterData{});
  parallel_for(n, options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t index = first + i;
      const Sampled s = sample_and_run(sampler, eq, seed, index, options.placement);
      EncounterOutcome o = summarize_trace(s.trace);
      o.index = index;
      if (nominal) {
        const double log_nominal = trace_log_likelihood(*nominal, s.encounter);
        o.weight = std::isinf(log_nominal) ? 0.0 : std::exp(log_nominal - s.encounter.log_probability);
      }
      out[i] = o;
      if (data) append_data(sampler, s.encounter, (*data)[i]);
    }
  });
  return out;
}

}  // namespace

EncounterOutcome run_encounter(const EncounterModel& model, const Equipage& eq, std::uint64_t seed,
                               std::uint64_t index, const PlacementOptions& placement) {
  EncounterOutcome o = summarize_trace(sample_and_run(model, eq, seed, index, placement).trace);
  o.index = index;
  return o;
}

MetricsReport summarize(const std::vector<EncounterOutcome>& outcomes) {
  MetricsReport r;
  r.n = outcomes.size();
  if (outcomes.empty()) return r;
  double sum = 0.0, sum_sq = 0.0, w_sum = 0.0, w_sq = 0.0;
  double alert = 0.0, strengthen = 0.0, reversal = 0.0, crossing = 0.0;
  for (const auto& o : outcomes) {
    const double x = o.nmac ? o.weight : 0.0;
    sum += x;
    sum_sq += x * x;
    w_sum += o.weight;
    w_sq += o.weight * o.weight;
    if (o.alert) alert += o.weight;
    if (o.strengthen) strengthen += o.weight;
    if (o.reversal) reversal += o.weight;
    if (o.crossing) crossing += o.weight;
    if (o.nmac) {
      ++r.nmac_count;
      if (o.weight == 0.0) ++r.support_violations;
    }
  }
  const double n = static_cast<double>(r.n);
  r.p_nmac = sum / n;
  r.p_nmac_se = std::sqrt(std::max(0.0, sum_sq / n - r.p_nmac * r.p_nmac) / n);
  if (w_sum > 0.0) {
    r.alert_rate = alert / w_sum;
    r.strengthen_rate = strengthen / w_sum;
    r.reversal_rate = reversal / w_sum;
    r.crossing_rate = crossing / w_sum;
    r.effective_sample_size = w_sum * w_sum / w_sq;
  }
  return r;
}

MetricsReport estimate_metrics(const EncounterModel& model, const Equipage& eq, std::uint64_t n,
                               std::uint64_t seed, const EvaluationOptions& options,
                               std::vector<EncounterOutcome>* outcomes) {
  if (n == 0) throw std::invalid_argument("estimate_metrics: n must be at least 1");
  eq.validate();
  auto results = run_batch(model, nullptr, eq, n, seed, 0, options);
  MetricsReport r = summarize(results);
  if (outcomes) *outcomes = std::move(results);
  return r;
}

RiskRatio risk_ratio(const MetricsReport& equipped, const MetricsReport& unequipped) {
  if (!(unequipped.p_nmac > 0.0)) {
    throw std::domain_error("risk_ratio: insufficient unequipped NMACs (unequipped p_nmac is 0)");
  }
  RiskRatio rr;
  rr.ratio = equipped.p_nmac / unequipped.p_nmac;
  // independent-sample delta method: Var(a/b) ~ (a/b)^2 (Va/a^2 + Vb/b^2)
  const double rel_b = unequipped.p_nmac_se / unequipped.p_nmac;
  if (equipped.p_nmac > 0.0) {
    const double rel_a = equipped.p_nmac_se / equipped.p_nmac;
    rr.standard_error = rr.ratio * std::sqrt(rel_a * rel_a + rel_b * rel_b);
  } else {
    rr.standard_error = equipped.p_nmac_se / unequipped.p_nmac;
  }
  return rr;
}

namespace {

bool same_nodes(const DiscreteBayesNet& a, const DiscreteBayesNet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.node(i);
    const auto& y = b.node(i);
    if (x.name != y.name || x.parents != y.parents || x.edges != y.edges) return false;
  }
  return true;
}

}  // namespace

void require_same_structure(const EncounterModel& a, const EncounterModel& b) {
  if (a.mode() != b.mode() || a.dt() != b.dt() || a.steps() != b.steps() ||
      !same_nodes(a.initial_net(), b.initial_net()) || !same_nodes(a.transition_net(), b.transition_net())) {
    throw std::invalid_argument("proposal does not share structure and bins with the nominal model");
  }
}

MetricsReport is_estimate(const EncounterModel& nominal, const EncounterModel& proposal,
                          const Equipage& eq, std::uint64_t n, std::uint64_t seed,
                          const EvaluationOptions& options, std::vector<EncounterOutcome>* outcomes) {
  if (n == 0) throw std::invalid_argument("is_estimate: n must be at least 1");
  require_same_structure(nominal, proposal);
  eq.validate();
  auto results = run_batch(proposal, &nominal, eq, n, seed, 0, options);
  MetricsReport r = summarize(results);
  if (outcomes) *outcomes = std::move(results);
  return r;
}

std::vector<std::size_t> severity_order(const std::vector<EncounterOutcome>& outcomes) {
  std::vector<std::size_t> order(outcomes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto& a = outcomes[i];
    const auto& b = outcomes[j];
    if (a.nmac != b.nmac) return a.nmac;
    if (a.nmac) return a.weight > b.weight;
    return a.min_separation < b.min_separation;
  });
  return order;
}

EncounterModel cross_entropy_adapt(const EncounterModel& nominal, const EncounterModel& proposal,
                                   const Equipage& eq, const CrossEntropyOptions& options,
                                   std::uint64_t seed) {
  if (!(options.elite_fraction > 0.0 && options.elite_fraction <= 1.0)) {
    throw std::invalid_argument("cross_entropy_adapt: elite_fraction must be in (0, 1]");
  }
  if (options.iterations < 0) throw std::invalid_argument("cross_entropy_adapt: negative iterations");
  const auto n = options.samples_per_iteration;
  const auto elite = static_cast<std::size_t>(std::floor(options.elite_fraction * static_cast<double>(n)));
  if (elite == 0) throw std::invalid_argument("cross_entropy_adapt: elite set is empty");
  require_same_structure(nominal, proposal);
  eq.validate();

  EncounterModel current = proposal;
  for (int it = 0; it < options.iterations; ++it) {
    std::vector<EncounterData> per_encounter;
    const auto outcomes = run_batch(current, &nominal, eq, n, seed, static_cast<std::uint64_t>(it) * n,
                                    options.evaluation, &per_encounter);
    const auto order = severity_order(outcomes);
    EncounterData elite_data;
    for (std::size_t k = 0; k < elite; ++k) {
      const auto& d = per_encounter[order[k]];
      elite_data.initial_rows.insert(elite_data.initial_rows.end(), d.initial_rows.begin(), d.initial_rows.end());
      elite_data.transition_rows.insert(elite_data.transition_rows.end(), d.transition_rows.begin(),
                                        d.transition_rows.end());
    }
    current = fit_model(current, elite_data, options.prior_count);
  }
  return current;
}

void write_report(std::ostream& out, const MetricsReport& r) {
  const auto old = out.precision(17);
  out << "n: " << r.n << '\n'
      << "p_nmac: " << r.p_nmac << '\n'
      << "p_nmac_se: " << r.p_nmac_se << '\n'
      << "nmac_count: " << r.nmac_count << '\n'
      << "alert_rate: " << r.alert_rate << '\n'
      << "strengthen_rate: " << r.strengthen_rate << '\n'
      << "reversal_rate: " << r.reversal_rate << '\n'
      << "crossing_rate: " << r.crossing_rate << '\n'
      << "effective_sample_size: " << r.effective_sample_size << '\n'
      << "support_violations: " << r.support_violations << '\n';
  out.precision(old);
}

void write_outcomes_csv(std::ostream& out, const std::vector<EncounterOutcome>& outcomes) {
  const auto old = out.precision(17);
  out << "index,weight,nmac,alert,strengthen,reversal,crossing,min_separation\n";
  for (const auto& o : outcomes) {
    out << o.index << ',' << o.weight << ',' << o.nmac << ',' << o.alert << ',' << o.strengthen << ','
        << o.reversal << ',' << o.crossing << ',' << o.min_separation << '\n';
  }
  out.precision(old);
}

}  // namespace cas
