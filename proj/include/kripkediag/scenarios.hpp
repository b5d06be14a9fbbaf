#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "kripkediag/sim.hpp"

// Built-in accelerator sector scenarios. All three share one plant: a
// cooling loop feeding an RF cavity, a klystron driving the cavity, and a
// vacuum pump in the same sector. They differ only in the injected faults.
//
// Constants are chosen against the default monitor thresholds (agents.hpp)
// so every fault symptom clears its threshold by at least 3x the PV's noise
// amplitude, and the confounding vacuum step stays at or below half of the
// vacuum threshold.

namespace kdiag::sim {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr int kDefaultDuration = 12;

namespace sector {

inline const PvId kValvePosition{"COOL:valve_position"};
inline const PvId kWaterPressure{"COOL:water_pressure"};
inline const PvId kCavityTemp{"RF:cavity_temp"};
inline const PvId kKlystronOutput{"RF:klystron_output"};
inline const PvId kForwardPower{"RF:forward_power"};
inline const PvId kVacuumPressure{"VAC:pressure"};

inline constexpr double kCavityRampRate = 2.0;   // degC per tick while the valve is off nominal
inline constexpr double kValveStuckAt = 20.0;    // % open
inline constexpr double kKlystronDrop = -15.0;   // MW
inline constexpr double kVacuumSpike = 0.8;      // nTorr

}  // namespace sector

inline std::vector<PvSpec> sector_pvs() {
  using namespace sector;
  return {
      PvSpec{kValvePosition, 80.0, 0.5, "%"},
      PvSpec{kWaterPressure, 4.0, 0.02, "bar"},
      PvSpec{kCavityTemp, 35.0, 0.1, "degC"},
      PvSpec{kKlystronOutput, 50.0, 0.2, "MW"},
      PvSpec{kForwardPower, 45.0, 0.2, "MW"},
      PvSpec{kVacuumPressure, 5.0, 0.1, "nTorr"},
  };
}

inline std::vector<CouplingRule> sector_couplings() {
  using namespace sector;
  return {
      CouplingRule{kValvePosition, kWaterPressure, 0.05, 0, CouplingMode::Instant, 0.0},
      CouplingRule{kValvePosition, kCavityTemp, 0.0, 0, CouplingMode::Ramp, kCavityRampRate},
      CouplingRule{kKlystronOutput, kForwardPower, 0.9, 0, CouplingMode::Instant, 0.0},
  };
}

inline constexpr std::array<std::string_view, 3> kBuiltinScenarioIds = {
    "cascading_cooling", "direct_klystron", "confounded_klystron"};

inline ScenarioSpec builtin_scenario(std::string_view id) {
  using namespace sector;
  ScenarioSpec spec;
  spec.id = std::string(id);
  spec.duration_ticks = kDefaultDuration;
  spec.pvs = sector_pvs();
  spec.couplings = sector_couplings();
  spec.seed = kDefaultSeed;

  if (id == "cascading_cooling") {
    spec.faults = {FaultSpec{3, kValvePosition, FaultKind::Stuck, kValveStuckAt}};
  } else if (id == "direct_klystron") {
    spec.faults = {FaultSpec{3, kKlystronOutput, FaultKind::Step, kKlystronDrop}};
  } else if (id == "confounded_klystron") {
    spec.faults = {FaultSpec{3, kKlystronOutput, FaultKind::Step, kKlystronDrop},
                   FaultSpec{4, kVacuumPressure, FaultKind::Step, kVacuumSpike}};
  } else {
    throw ScenarioError("unknown built-in scenario '" + std::string(id) + "'");
  }
  validate(spec);
  return spec;
}

}  // namespace kdiag::sim
