#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kripkediag/hypothesis.hpp"
#include "kripkediag/kripke_model.hpp"
#include "kripkediag/model_io.hpp"
#include "kripkediag/reports.hpp"
#include "kripkediag/sim.hpp"
#include "kripkediag/topology.hpp"
#include "kripkediag/vocabulary.hpp"

namespace kdiag::agents {

using modal::KripkeModel;
using modal::Valuation;
using modal::WorldId;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCoolingAgent = "Cooling_Agent";
inline constexpr const char* kKlystronAgent = "Klystron_Agent";
inline constexpr const char* kRfAgent = "RF_Agent";
inline constexpr const char* kVacuumAgent = "Vacuum_Agent";

// ---------------------------------------------------------------------------
// Component monitors

struct WatchedPv {
  sim::PvId pv;
  double threshold;  // report when |observed - baseline| > threshold
  double baseline;
};

struct MonitorConfig {
  std::string agent;
  std::vector<WatchedPv> watched;
};

inline void validate(const MonitorConfig& cfg) {
  for (const auto& w : cfg.watched)
    if (!(w.threshold > 0.0))
      throw ConfigError(cfg.agent + ": threshold for '" + w.pv.name() + "' must be positive");
}

/// Vacuum monitor reporting threshold, nTorr.
inline constexpr double kVacuumThreshold = 2.0;

struct DefaultWatch {
  const char* agent;
  const char* pv;
  double threshold;
};

inline constexpr DefaultWatch kDefaultWatches[] = {
    {kCoolingAgent, "COOL:valve_position", 5.0},
    {kCoolingAgent, "COOL:water_pressure", 0.5},
    {kKlystronAgent, "RF:klystron_output", 5.0},
    {kRfAgent, "RF:cavity_temp", 3.0},
    {kRfAgent, "RF:forward_power", 5.0},
    {kVacuumAgent, "VAC:pressure", kVacuumThreshold},
};

/// The four sector monitors, sorted by agent id, with baselines taken from
/// the scenario.
inline std::vector<MonitorConfig> default_monitors(const sim::ScenarioSpec& spec) {
  std::map<std::string, MonitorConfig> by_agent;
  for (const auto& w : kDefaultWatches) {
    sim::PvId pv(w.pv);
    auto it = std::find_if(spec.pvs.begin(), spec.pvs.end(), [&](const auto& p) { return p.id == pv; });
    if (it == spec.pvs.end())
      throw ConfigError("scenario '" + spec.id + "' lacks monitored PV '" + pv.name() + "'");
    auto& cfg = by_agent.try_emplace(w.agent, MonitorConfig{w.agent, {}}).first->second;
    cfg.watched.push_back(WatchedPv{pv, w.threshold, it->baseline});
  }
  std::vector<MonitorConfig> out;
  for (auto& [_, cfg] : by_agent) out.push_back(std::move(cfg));
  return out;
}

struct AnomalyReport {
  std::string agent;
  hypo::AnomalyContext ctx;
};

inline std::vector<AnomalyReport> detect_anomaly(const MonitorConfig& cfg, const sim::TickRecord& record) {
  std::vector<AnomalyReport> out;
  for (const auto& w : cfg.watched) {
    auto it = record.values.find(w.pv);
    if (it == record.values.end())
      throw ConfigError(cfg.agent + ": tick record has no value for '" + w.pv.name() + "'");
    if (std::abs(it->second - w.baseline) > w.threshold)
      out.push_back(AnomalyReport{cfg.agent, hypo::AnomalyContext::make(w.pv, record.tick, it->second, w.baseline)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Belief formalization

/// Nominal world w0 with an edge to one candidate world per fault class.
/// Every world is reflexive.
inline KripkeModel initial_belief() {
  using namespace vocab;
  std::map<WorldId, Valuation> worlds{
      {"w0", {system_nominal}},
      {"w_cool", {cooling_fault_reported}},
      {"w_kly", {klystron_fault_reported, rf_power_fault_reported}},
      {"w_vac", {vacuum_fault_reported}},
  };
  std::set<modal::Edge> edges;
  for (const auto& [id, _] : worlds) {
    edges.emplace(id, id);
    if (id != "w0") edges.emplace("w0", id);
  }
  return KripkeModel(std::move(worlds), std::move(edges), "w0", vocab::global_vocabulary());
}

/// Diagnosis-level atom implied by a report-level atom, if any.
inline std::optional<Proposition> diagnosis_atom(const Proposition& p) {
  if (p == vocab::cooling_fault_reported) return vocab::cooling_insufficient;
  if (p == vocab::rf_overheat_reported) return vocab::rf_overheats;
  if (p == vocab::klystron_fault_reported) return vocab::klystron_damaged;
  if (p == vocab::rf_power_fault_reported) return vocab::rf_power_low;
  return std::nullopt;
}

/// Valuation of the world in which `theory` holds: its causal chain, the
/// matching diagnosis atoms, and rf_fault_is_root_cause for an RF root.
inline Valuation theory_valuation(const hypo::CausalTheory& theory) {
  Valuation v;
  for (const auto& p : theory.chain()) {
    v.insert(p);
    if (auto d = diagnosis_atom(p)) v.insert(*d);
  }
  if (vocab::is_rf_fault(theory.root_cause)) v.insert(vocab::rf_fault_is_root_cause);
  return v;
}

/// Valuation of the world where `effect` occurs without the theory's root.
/// The theory claims causation one way only, so such a world must be
/// admissible; an RF fault with no upstream cause is its own root cause.
inline Valuation effect_only_valuation(const Proposition& effect) {
  Valuation v{effect};
  if (auto d = diagnosis_atom(effect)) v.insert(*d);
  if (vocab::is_rf_fault(effect)) v.insert(vocab::rf_fault_is_root_cause);
  return v;
}

struct Formalization {
  KripkeModel candidate;
  WorldId diagnosis_world;
  Valuation diagnosis_props;
};

/// Builds the hypothetical model for `theory`. A first theory gets a fresh
/// current world reachable from the old anchor; a later theory revises the
/// existing diagnosis world in place. Each effect also gets an effect-only
/// successor of the diagnosis world.
inline Formalization formalize(const KripkeModel& belief, const hypo::CausalTheory& theory,
                               const std::optional<WorldId>& diagnosis_world, const Valuation& prior_props) {
  const Valuation props = theory_valuation(theory);
  modal::HypotheticalUpdate update;
  update.add = props;
  if (diagnosis_world) {
    update.target = *diagnosis_world;
    for (const auto& p : prior_props)
      if (!props.contains(p)) update.remove.insert(p);
  } else {
    const WorldId fresh(modal::kNewWorld);
    update.new_edges = {{belief.current(), fresh}, {fresh, fresh}};
    update.new_current = fresh;
  }
  KripkeModel candidate = modal::with_hypothesis(belief, update);
  const WorldId world = candidate.current();

  for (const auto& effect : theory.effects) {
    const WorldId fresh(modal::kNewWorld);
    modal::HypotheticalUpdate cf;
    cf.add = effect_only_valuation(effect);
    cf.new_edges = {{world, fresh}, {fresh, fresh}};
    candidate = modal::with_hypothesis(candidate, cf);
  }
  return Formalization{std::move(candidate), world, props};
}

// ---------------------------------------------------------------------------
// Reasoning agent

struct TraceEvent {
  int tick = 0;
  std::string kind;
  nlohmann::json payload;
};

inline nlohmann::json to_json(const TraceEvent& e) {
  return {{"tick", e.tick}, {"kind", e.kind}, {"payload", e.payload}};
}

inline nlohmann::json to_json(const hypo::CausalTheory& t) {
  auto effects = nlohmann::json::array();
  for (const auto& e : t.effects) effects.push_back(e.name());
  nlohmann::json j{{"root_cause", t.root_cause.name()},
                   {"effects", std::move(effects)},
                   {"narrative", t.narrative},
                   {"source", hypo::to_string(t.source)}};
  if (t.fallback_reason) j["fallback_reason"] = *t.fallback_reason;
  return j;
}

inline nlohmann::json to_json(const Valuation& v) {
  auto out = nlohmann::json::array();
  for (const auto& p : v) out.push_back(p.name());
  return out;
}

struct ReasonerState {
  KripkeModel belief = initial_belief();
  std::vector<FaultReport> reports;  // one per (agent, proposition), first arrival kept
  std::optional<hypo::CausalTheory> theory;
  std::size_t coverage = 0;
  std::optional<WorldId> diagnosis_world;
  Valuation diagnosis_props;
};

struct TickOutcome {
  ReasonerState state;
  std::vector<TraceEvent> events;
};

/// Number of accumulated reports whose atom lies on the theory's chain.
inline std::size_t coverage(const hypo::CausalTheory& theory, std::span<const FaultReport> reports) {
  const auto chain = theory.chain();
  return static_cast<std::size_t>(
      std::count_if(reports.begin(), reports.end(), [&](const auto& r) { return chain.contains(r.proposition()); }));
}

/// One pass of the reasoning loop: accumulate reports, theorize, formalize,
/// validate against axioms and topology, then commit and prune. Failures
/// leave the committed belief untouched and show up as trace events.
inline TickOutcome reason_tick(const ReasonerState& prior, int tick, std::span<const FaultReport> incoming,
                               const modal::AxiomSet& axioms, const TopologyGraph& topo,
                               hypo::HypothesisGenerator& generator) {
  TickOutcome out{prior, {}};
  ReasonerState& state = out.state;
  auto emit = [&](std::string kind, nlohmann::json payload) {
    out.events.push_back(TraceEvent{tick, std::move(kind), std::move(payload)});
  };

  bool grew = false;
  for (const auto& r : incoming) {
    bool known = std::any_of(state.reports.begin(), state.reports.end(), [&](const auto& k) {
      return k.agent() == r.agent() && k.proposition() == r.proposition();
    });
    if (known) continue;
    state.reports.push_back(r);
    grew = true;
    nlohmann::json payload{{"agent", r.agent()},
                           {"pv", r.pv().name()},
                           {"observed", r.context().observed},
                           {"deviation", r.context().deviation},
                           {"suspected_system", hypo::to_string(r.system())},
                           {"proposition", r.proposition().name()},
                           {"source", hypo::to_string(r.classification().source)}};
    if (r.classification().fallback_reason) payload["fallback_reason"] = *r.classification().fallback_reason;
    emit("report_received", std::move(payload));
  }
  if (!grew) return out;

  hypo::CausalTheory theory = generator.theorize(state.reports, &topo);
  const std::size_t cov = coverage(theory, state.reports);
  {
    auto j = to_json(theory);
    j["coverage"] = cov;
    emit("theory_proposed", std::move(j));
  }

  if (state.theory) {
    if (state.theory->same_chain(theory)) {
      state.coverage = cov;
      emit("theory_retained", {{"reason", "matches committed theory"}});
      return out;
    }
    if (cov <= state.coverage) {
      emit("theory_retained",
           {{"reason", "coverage not higher than committed theory"}, {"committed_coverage", state.coverage},
            {"coverage", cov}});
      return out;
    }
  }

  try {
    hypo::validate(theory);
  } catch (const hypo::TheoryError& e) {
    emit("reject", {{"stage", "theory"}, {"reason", e.what()}});
    return out;
  }

  auto formal = formalize(state.belief, theory, state.diagnosis_world, state.diagnosis_props);

  auto validation = modal::check_axioms(formal.candidate, axioms);
  {
    auto violations = nlohmann::json::array();
    for (const auto& v : validation.violations) violations.push_back({{"axiom", v.axiom}, {"world", v.world}});
    emit("axiom_check", {{"ok", validation.ok()}, {"violations", violations}});
    if (!validation.ok()) {
      emit("reject", {{"stage", "axioms"}, {"violations", std::move(violations)}});
      return out;
    }
  }

  // Ground the chain physically: the root's earliest reporter must be
  // connected to every other agent whose report the theory explains.
  const FaultReport* anchor = nullptr;
  for (const auto& r : state.reports) {
    if (r.proposition() != theory.root_cause) continue;
    if (!anchor || std::tuple(r.tick(), r.agent(), r.pv()) < std::tuple(anchor->tick(), anchor->agent(), anchor->pv()))
      anchor = &r;
  }
  if (!anchor) {
    emit("reject", {{"stage", "grounding"}, {"reason", "no report supports root cause " + theory.root_cause.name()}});
    return out;
  }
  const auto chain = theory.chain();
  const std::string& from = topo.owner_of(anchor->pv());
  std::set<std::string> queried;
  for (const auto& r : state.reports) {
    if (r.agent() == anchor->agent() || !chain.contains(r.proposition())) continue;
    const std::string& to = topo.owner_of(r.pv());
    if (!queried.insert(to).second) continue;
    auto answer = query_connectivity(topo, from, to);
    auto path = nlohmann::json::array();
    for (const auto& e : answer.path) path.push_back(to_json(e));
    emit("connectivity_query", {{"from", from}, {"to", to}, {"connected", answer.connected}, {"path", path}});
    if (!answer.connected) {
      emit("reject", {{"stage", "topology"}, {"from", from}, {"to", to}});
      return out;
    }
  }

  auto committed = modal::commit(state.belief, formal.candidate, axioms);
  if (!committed.accepted()) {
    emit("reject", {{"stage", "commit"}});
    return out;
  }
  emit("commit", {{"world", formal.diagnosis_world},
                  {"valuation", to_json(formal.diagnosis_props)},
                  {"candidate_worlds", committed.belief.worlds().size()}});

  auto pruned = modal::prune_worlds(committed.belief, {formal.diagnosis_world});
  if (!modal::check_axioms(pruned, axioms).ok()) {
    emit("reject", {{"stage", "prune"}});
    return out;
  }
  auto removed = nlohmann::json::array();
  for (const auto& [id, _] : committed.belief.worlds())
    if (!pruned.has_world(id)) removed.push_back(id);
  emit("prune", {{"kept", {formal.diagnosis_world}}, {"removed", std::move(removed)}});

  state.belief = std::move(pruned);
  state.theory = std::move(theory);
  state.coverage = cov;
  state.diagnosis_world = formal.diagnosis_world;
  state.diagnosis_props = std::move(formal.diagnosis_props);
  return out;
}

// ---------------------------------------------------------------------------
// Episodes

struct Diagnosis {
  std::string scenario;
  std::optional<Proposition> root_cause;
  std::optional<hypo::CausalTheory> theory;
  KripkeModel final_model;
  std::vector<TraceEvent> trace;

  bool committed() const noexcept { return root_cause.has_value(); }
};

inline nlohmann::json to_json(const Diagnosis& d) {
  auto trace = nlohmann::json::array();
  for (const auto& e : d.trace) trace.push_back(to_json(e));
  return {{"scenario", d.scenario},
          {"root_cause", d.root_cause ? nlohmann::json(d.root_cause->name()) : nlohmann::json(nullptr)},
          {"theory", d.theory ? to_json(*d.theory) : nlohmann::json(nullptr)},
          {"final_model", modal::to_json(d.final_model)},
          {"trace", std::move(trace)}};
}

inline std::string dump_diagnosis(const Diagnosis& d) { return to_json(d).dump(2) + "\n"; }

struct SystemConfig {
  modal::AxiomSet axioms;
  TopologyGraph topology = sector_topology();
  std::optional<std::vector<MonitorConfig>> monitors;  // default_monitors(spec) when empty
  hypo::HypothesisGenerator* generator = nullptr;      // rule-based when null
  std::map<int, std::vector<FaultReport>> injected_reports;  // bypass the monitors
  std::function<void(int, const ReasonerState&)> on_tick;
};

struct Episode {
  Diagnosis diagnosis;
  std::vector<sim::TickRecord> records;
};

/// Runs the full loop: per tick the simulator steps, every monitor (in agent
/// order) classifies its anomalies, then the reasoner takes the reports.
inline Episode run_episode_full(const sim::ScenarioSpec& spec, const SystemConfig& cfg) {
  sim::SimState sim_state(spec);
  auto monitors = cfg.monitors ? *cfg.monitors : default_monitors(spec);
  std::sort(monitors.begin(), monitors.end(), [](const auto& a, const auto& b) { return a.agent < b.agent; });
  for (const auto& m : monitors) {
    validate(m);
    for (const auto& w : m.watched) {
      auto it = std::find_if(spec.pvs.begin(), spec.pvs.end(), [&](const auto& p) { return p.id == w.pv; });
      if (it == spec.pvs.end()) throw ConfigError(m.agent + " watches unknown PV '" + w.pv.name() + "'");
      try {
        cfg.topology.owner_of(w.pv);
      } catch (const TopologyError& e) {
        throw ConfigError(e.what());
      }
    }
  }

  ReasonerState reasoner;
  try {
    if (auto v = modal::check_axioms(reasoner.belief, cfg.axioms); !v.ok())
      throw ConfigError("initial belief violates axiom '" + v.violations.front().axiom + "'");
  } catch (const modal::UnknownAtomError& e) {
    throw ConfigError(std::string("axiom set: ") + e.what());
  }

  hypo::RuleBasedGenerator rule_generator;
  hypo::HypothesisGenerator& generator = cfg.generator ? *cfg.generator : rule_generator;

  Episode episode{Diagnosis{spec.id, std::nullopt, std::nullopt, reasoner.belief, {}}, {}};
  while (!sim_state.finished()) {
    auto [next, record] = sim::step(sim_state);
    sim_state = std::move(next);
    const int tick = record.tick;

    std::vector<FaultReport> reports;
    for (const auto& m : monitors) {
      for (auto& anomaly : detect_anomaly(m, record)) {
        try {
          auto c = generator.classify(anomaly.ctx);
          reports.emplace_back(anomaly.agent, anomaly.ctx, std::move(c));
        } catch (const hypo::UnclassifiableError& e) {
          episode.diagnosis.trace.push_back(
              TraceEvent{tick, "unclassifiable", {{"agent", anomaly.agent}, {"pv", anomaly.ctx.pv.name()}}});
        }
      }
    }
    if (auto it = cfg.injected_reports.find(tick); it != cfg.injected_reports.end())
      reports.insert(reports.end(), it->second.begin(), it->second.end());

    auto outcome = reason_tick(reasoner, tick, reports, cfg.axioms, cfg.topology, generator);
    reasoner = std::move(outcome.state);
    for (auto& e : outcome.events) episode.diagnosis.trace.push_back(std::move(e));
    if (cfg.on_tick) cfg.on_tick(tick, reasoner);
    episode.records.push_back(std::move(record));
  }

  if (reasoner.theory) {
    episode.diagnosis.root_cause = reasoner.theory->root_cause;
    episode.diagnosis.theory = reasoner.theory;
  }
  episode.diagnosis.final_model = reasoner.belief;
  return episode;
}

inline Diagnosis run_episode(const sim::ScenarioSpec& spec, const SystemConfig& cfg) {
  return run_episode_full(spec, cfg).diagnosis;
}

}  // namespace kdiag::agents
