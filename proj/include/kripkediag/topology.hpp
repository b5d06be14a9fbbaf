#pragma once

#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kripkediag/sim.hpp"

namespace kdiag::agents {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Relation { Cools, Powers, Colocated };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::Cools: return "cools";
    case Relation::Powers: return "powers";
    case Relation::Colocated: return "colocated";
  }
  return "?";
}

inline Relation relation_from_string(const std::string& s) {
  if (s == "cools") return Relation::Cools;
  if (s == "powers") return Relation::Powers;
  if (s == "colocated") return Relation::Colocated;
  throw TopologyError("unknown relation '" + s + "'");
}

struct TopologyEdge {
  std::string from;
  std::string to;
  Relation relation;

  friend bool operator==(const TopologyEdge&, const TopologyEdge&) = default;
  friend auto operator<=>(const TopologyEdge&, const TopologyEdge&) = default;
};

/// Static physical layout of the sector: what is connected to what, and
/// which component each process variable belongs to.
class TopologyGraph {
 public:
  TopologyGraph(std::set<std::string> components, std::set<TopologyEdge> edges,
                std::map<sim::PvId, std::string> pv_owner)
      : components_(std::move(components)), edges_(std::move(edges)), pv_owner_(std::move(pv_owner)) {
    for (const auto& e : edges_) {
      require(e.from);
      require(e.to);
    }
    for (const auto& [pv, owner] : pv_owner_) require(owner);
  }

  const std::set<std::string>& components() const noexcept { return components_; }
  const std::set<TopologyEdge>& edges() const noexcept { return edges_; }
  const std::map<sim::PvId, std::string>& pv_owner() const noexcept { return pv_owner_; }

  bool has_component(const std::string& c) const { return components_.contains(c); }

  const std::string& owner_of(const sim::PvId& pv) const {
    auto it = pv_owner_.find(pv);
    if (it == pv_owner_.end()) throw TopologyError("PV '" + pv.name() + "' has no owning component");
    return it->second;
  }

  friend bool operator==(const TopologyGraph&, const TopologyGraph&) = default;

 private:
  void require(const std::string& c) const {
    if (!components_.contains(c)) throw TopologyError("unknown component '" + c + "'");
  }

  std::set<std::string> components_;
  std::set<TopologyEdge> edges_;
  std::map<sim::PvId, std::string> pv_owner_;
};

struct ConnectivityAnswer {
  bool connected = false;
  std::vector<TopologyEdge> path;
};

/// Undirected reachability. Connectivity says nothing about whether a causal
/// link is admissible; that is left to the axioms and theory rules.
inline ConnectivityAnswer query_connectivity(const TopologyGraph& topo, const std::string& a,
                                             const std::string& b) {
  if (!topo.has_component(a)) throw TopologyError("unknown component '" + a + "'");
  if (!topo.has_component(b)) throw TopologyError("unknown component '" + b + "'");
  if (a == b) return {true, {}};

  std::map<std::string, std::optional<TopologyEdge>> via;  // edge used to reach each node
  via.emplace(a, std::nullopt);
  std::deque<std::string> frontier{a};
  while (!frontier.empty()) {
    std::string node = frontier.front();
    frontier.pop_front();
    for (const auto& e : topo.edges()) {
      const std::string* next = nullptr;
      if (e.from == node) next = &e.to;
      else if (e.to == node) next = &e.from;
      if (!next || via.contains(*next)) continue;
      via.emplace(*next, e);
      if (*next == b) {
        std::vector<TopologyEdge> path;
        for (std::string at = b; via.at(at);) {
          const TopologyEdge& edge = *via.at(at);
          path.insert(path.begin(), edge);
          at = edge.from == at ? edge.to : edge.from;
        }
        return {true, std::move(path)};
      }
      frontier.push_back(*next);
    }
  }
  return {false, {}};
}

inline nlohmann::json to_json(const TopologyEdge& e) {
  return {{"from", e.from}, {"to", e.to}, {"relation", to_string(e.relation)}};
}

inline nlohmann::json to_json(const TopologyGraph& topo) {
  auto edges = nlohmann::json::array();
  for (const auto& e : topo.edges()) edges.push_back(to_json(e));
  nlohmann::json owners = nlohmann::json::object();
  for (const auto& [pv, c] : topo.pv_owner()) owners[pv.name()] = c;
  return {{"components", topo.components()}, {"edges", std::move(edges)}, {"pv_owner", std::move(owners)}};
}

inline TopologyGraph topology_from_json(const nlohmann::json& j) {
  try {
    std::set<std::string> components = j.at("components").get<std::set<std::string>>();
    std::set<TopologyEdge> edges;
    for (const auto& e : j.at("edges"))
      edges.insert(TopologyEdge{e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                                relation_from_string(e.at("relation").get<std::string>())});
    std::map<sim::PvId, std::string> owners;
    for (const auto& [pv, c] : j.at("pv_owner").items()) owners.emplace(sim::PvId(pv), c.get<std::string>());
    return TopologyGraph(std::move(components), std::move(edges), std::move(owners));
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("malformed topology: ") + e.what());
  } catch (const sim::ScenarioError& e) {
    throw TopologyError(std::string("malformed topology: ") + e.what());
  }
}

inline TopologyGraph load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot read topology file '" + path + "'");
  try {
    return topology_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw TopologyError("malformed topology file '" + path + "': " + e.what());
  }
}

/// The sector layout matching the built-in scenarios.
inline TopologyGraph sector_topology() {
  return TopologyGraph(
      {"cooling_loop_A", "klystron_1", "rf_cavity_1", "vacuum_pump_S1"},
      {TopologyEdge{"cooling_loop_A", "rf_cavity_1", Relation::Cools},
       TopologyEdge{"klystron_1", "rf_cavity_1", Relation::Powers},
       TopologyEdge{"vacuum_pump_S1", "klystron_1", Relation::Colocated}},
      {{sim::PvId("COOL:valve_position"), "cooling_loop_A"},
       {sim::PvId("COOL:water_pressure"), "cooling_loop_A"},
       {sim::PvId("RF:cavity_temp"), "rf_cavity_1"},
       {sim::PvId("RF:forward_power"), "rf_cavity_1"},
       {sim::PvId("RF:klystron_output"), "klystron_1"},
       {sim::PvId("VAC:pressure"), "vacuum_pump_S1"}});
}

}  // namespace kdiag::agents
