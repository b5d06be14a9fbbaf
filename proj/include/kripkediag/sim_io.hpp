#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kripkediag/sim.hpp"

namespace kdiag::sim {

inline const char* to_string(CouplingMode m) { return m == CouplingMode::Instant ? "instant" : "ramp"; }
inline const char* to_string(FaultKind k) { return k == FaultKind::Stuck ? "stuck" : "step"; }

inline CouplingMode coupling_mode_from_string(const std::string& s) {
  if (s == "instant") return CouplingMode::Instant;
  if (s == "ramp") return CouplingMode::Ramp;
  throw ScenarioError("unknown coupling mode '" + s + "'");
}

inline FaultKind fault_kind_from_string(const std::string& s) {
  if (s == "stuck") return FaultKind::Stuck;
  if (s == "step") return FaultKind::Step;
  throw ScenarioError("unknown fault kind '" + s + "'");
}

inline nlohmann::json to_json(const ScenarioSpec& spec) {
  auto pvs = nlohmann::json::array();
  for (const auto& pv : spec.pvs)
    pvs.push_back({{"id", pv.id.name()},
                   {"baseline", pv.baseline},
                   {"noise_amplitude", pv.noise_amplitude},
                   {"units", pv.units}});
  auto couplings = nlohmann::json::array();
  for (const auto& c : spec.couplings)
    couplings.push_back({{"source", c.source.name()},
                         {"target", c.target.name()},
                         {"gain", c.gain},
                         {"delay_ticks", c.delay_ticks},
                         {"mode", to_string(c.mode)},
                         {"ramp_rate", c.ramp_rate}});
  auto faults = nlohmann::json::array();
  for (const auto& f : spec.faults)
    faults.push_back({{"tick", f.tick},
                      {"target", f.target.name()},
                      {"kind", to_string(f.kind)},
                      {"magnitude", f.magnitude}});
  return {{"id", spec.id},
          {"duration_ticks", spec.duration_ticks},
          {"pvs", std::move(pvs)},
          {"couplings", std::move(couplings)},
          {"faults", std::move(faults)},
          {"seed", spec.seed}};
}

/// Parses and validates a scenario. Throws ScenarioError on any problem.
inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  try {
    ScenarioSpec spec;
    spec.id = j.at("id").get<std::string>();
    spec.duration_ticks = j.at("duration_ticks").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& pv : j.at("pvs"))
      spec.pvs.push_back(PvSpec{PvId(pv.at("id").get<std::string>()), pv.at("baseline").get<double>(),
                                pv.at("noise_amplitude").get<double>(), pv.value("units", std::string{})});
    for (const auto& c : j.value("couplings", nlohmann::json::array()))
      spec.couplings.push_back(CouplingRule{PvId(c.at("source").get<std::string>()),
                                            PvId(c.at("target").get<std::string>()),
                                            c.value("gain", 0.0), c.value("delay_ticks", 0),
                                            coupling_mode_from_string(c.at("mode").get<std::string>()),
                                            c.value("ramp_rate", 0.0)});
    for (const auto& f : j.value("faults", nlohmann::json::array()))
      spec.faults.push_back(FaultSpec{f.at("tick").get<int>(), PvId(f.at("target").get<std::string>()),
                                      fault_kind_from_string(f.at("kind").get<std::string>()),
                                      f.at("magnitude").get<double>()});
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
}

inline ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file '" + path + "'");
  try {
    return scenario_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("malformed scenario file '" + path + "': " + e.what());
  }
}

/// `tick,<pv names sorted>` header, then observed values with 6 decimals.
inline std::string to_csv(const std::vector<TickRecord>& records) {
  std::string out = "tick";
  if (!records.empty())
    for (const auto& [pv, _] : records.front().values) out += "," + pv.name();
  out += "\n";
  char buf[64];
  for (const auto& r : records) {
    out += std::to_string(r.tick);
    for (const auto& [pv, v] : r.values) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace kdiag::sim
