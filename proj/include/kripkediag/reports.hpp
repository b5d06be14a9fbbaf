#pragma once

#include <string>
#include <utility>

#include "kripkediag/hypothesis_types.hpp"
#include "kripkediag/vocabulary.hpp"

namespace kdiag::agents {

using modal::Proposition;

/// Fixed classification -> proposition table.
inline const Proposition& map_to_proposition(hypo::Subsystem s) {
  switch (s) {
    case hypo::Subsystem::Cooling: return vocab::cooling_fault_reported;
    case hypo::Subsystem::Klystron: return vocab::klystron_fault_reported;
    case hypo::Subsystem::Power: return vocab::rf_power_fault_reported;
    case hypo::Subsystem::Vacuum: return vocab::vacuum_fault_reported;
  }
  throw std::logic_error("unreachable subsystem");
}

inline const Proposition& map_to_proposition(const hypo::Classification& c) {
  return map_to_proposition(c.suspected_system);
}

/// A monitor's classified anomaly. The proposition is derived from the
/// classification on construction and cannot disagree with it.
class FaultReport {
 public:
  FaultReport(std::string agent, hypo::AnomalyContext ctx, hypo::Classification classification)
      : agent_(std::move(agent)),
        ctx_(std::move(ctx)),
        classification_(std::move(classification)),
        proposition_(map_to_proposition(classification_)) {}

  const std::string& agent() const noexcept { return agent_; }
  int tick() const noexcept { return ctx_.tick; }
  const hypo::AnomalyContext& context() const noexcept { return ctx_; }
  const sim::PvId& pv() const noexcept { return ctx_.pv; }
  const hypo::Classification& classification() const noexcept { return classification_; }
  hypo::Subsystem system() const noexcept { return classification_.suspected_system; }
  const Proposition& proposition() const noexcept { return proposition_; }

 private:
  std::string agent_;
  hypo::AnomalyContext ctx_;
  hypo::Classification classification_;
  Proposition proposition_;
};

}  // namespace kdiag::agents
