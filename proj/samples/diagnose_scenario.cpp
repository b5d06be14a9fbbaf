// Runs every built-in scenario with the rule-based generator and prints
// the verdict plus the final belief model.
#include <iostream>

#include "kripkediag/agents.hpp"
#include "kripkediag/formula_parser.hpp"
#include "kripkediag/model_io.hpp"
#include "kripkediag/scenarios.hpp"

int main() {
  using namespace kdiag;
  agents::SystemConfig cfg;
  cfg.axioms = lang::parse_axiom_file(
                   "causal_direction: [](klystron_fault_reported -> rf_power_fault_reported)\n"
                   "fault_exclusion: []!(cooling_fault_reported & klystron_fault_reported)\n"
                   "vacuum_prune: [](vacuum_fault_reported -> !<>rf_fault_is_root_cause)\n")
                   .to_axiom_set();

  for (auto id : sim::kBuiltinScenarioIds) {
    auto diagnosis = agents::run_episode(sim::builtin_scenario(id), cfg);
    std::cout << id << ": " << (diagnosis.committed() ? diagnosis.root_cause->name() : "none") << "\n";
    std::cout << modal::dump_model(diagnosis.final_model);
  }
}
