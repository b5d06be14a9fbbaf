#pragma once

#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "kripkediag/kripke_model.hpp"

namespace kdiag::modal {

/// Canonical JSON form: sorted keys, sorted proposition lists, sorted edges.
inline nlohmann::json to_json(const KripkeModel& model) {
  nlohmann::json worlds = nlohmann::json::object();
  for (const auto& [id, valuation] : model.worlds()) {
    auto props = nlohmann::json::array();
    for (const auto& p : valuation) props.push_back(p.name());
    worlds[id] = std::move(props);
  }
  auto edges = nlohmann::json::array();
  for (const auto& [from, to] : model.accessibility()) edges.push_back({from, to});
  auto vocabulary = nlohmann::json::array();
  for (const auto& p : model.vocabulary()) vocabulary.push_back(p.name());

  return nlohmann::json{{"worlds", std::move(worlds)},
                        {"accessibility", std::move(edges)},
                        {"current", model.current()},
                        {"vocabulary", std::move(vocabulary)}};
}

inline std::string dump_model(const KripkeModel& model) { return to_json(model).dump(2) + "\n"; }

inline KripkeModel model_from_json(const nlohmann::json& j) {
  std::map<WorldId, Valuation> worlds;
  for (const auto& [id, props] : j.at("worlds").items()) {
    Valuation v;
    for (const auto& p : props) v.insert(Proposition(p.get<std::string>()));
    worlds.emplace(id, std::move(v));
  }
  std::set<Edge> accessibility;
  for (const auto& e : j.at("accessibility")) {
    if (!e.is_array() || e.size() != 2) throw ModelError("accessibility entries must be pairs");
    accessibility.emplace(e[0].get<std::string>(), e[1].get<std::string>());
  }
  std::set<Proposition> vocabulary;
  for (const auto& p : j.at("vocabulary")) vocabulary.insert(Proposition(p.get<std::string>()));
  return KripkeModel(std::move(worlds), std::move(accessibility), j.at("current").get<std::string>(),
                     std::move(vocabulary));
}

/// Graphviz rendering. Write-only; nothing parses it back.
inline std::string to_dot(const KripkeModel& model) {
  std::ostringstream out;
  out << "digraph kripke {\n";
  for (const auto& [id, valuation] : model.worlds()) {
    out << "  \"" << id << "\" [shape=" << (id == model.current() ? "doublecircle" : "circle")
        << ", label=\"" << id << "\\n{";
    bool first = true;
    for (const auto& p : valuation) {
      out << (first ? "" : ", ") << p.name();
      first = false;
    }
    out << "}\"];\n";
  }
  for (const auto& [from, to] : model.accessibility())
    out << "  \"" << from << "\" -> \"" << to << "\";\n";
  out << "}\n";
  return out.str();
}

}  // namespace kdiag::modal
