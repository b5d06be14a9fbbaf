#pragma once

#include <set>

#include "kripkediag/proposition.hpp"

// The closed set of propositions the diagnostic agents reason with.

namespace kdiag::vocab {

using modal::Proposition;

// Report-level atoms, one per classifiable subsystem.
inline const Proposition cooling_fault_reported{"cooling_fault_reported"};
inline const Proposition klystron_fault_reported{"klystron_fault_reported"};
inline const Proposition rf_power_fault_reported{"rf_power_fault_reported"};
inline const Proposition vacuum_fault_reported{"vacuum_fault_reported"};
inline const Proposition rf_overheat_reported{"rf_overheat_reported"};

// Diagnosis-level atoms.
inline const Proposition system_nominal{"system_nominal"};
inline const Proposition rf_fault_is_root_cause{"rf_fault_is_root_cause"};
inline const Proposition cooling_insufficient{"cooling_insufficient"};
inline const Proposition rf_overheats{"RF_overheats"};
inline const Proposition klystron_damaged{"klystron_damaged"};
inline const Proposition rf_power_low{"rf_power_low"};

inline std::set<Proposition> global_vocabulary() {
  return {cooling_fault_reported, klystron_fault_reported, rf_power_fault_reported,
          vacuum_fault_reported,  rf_overheat_reported,    system_nominal,
          rf_fault_is_root_cause, cooling_insufficient,    rf_overheats,
          klystron_damaged,       rf_power_low};
}

/// Report-level atoms describing a fault inside the RF subsystem.
inline bool is_rf_fault(const Proposition& p) {
  return p == klystron_fault_reported || p == rf_power_fault_reported || p == rf_overheat_reported;
}

}  // namespace kdiag::vocab
