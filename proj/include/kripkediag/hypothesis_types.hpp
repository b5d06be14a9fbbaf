#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kripkediag/proposition.hpp"
#include "kripkediag/sim.hpp"
#include "kripkediag/vocabulary.hpp"

namespace kdiag::hypo {

using modal::Proposition;

/// The closed classification vocabulary. Spellings are case-sensitive.
enum class Subsystem { Cooling, Power, Vacuum, Klystron };

inline const char* to_string(Subsystem s) {
  switch (s) {
    case Subsystem::Cooling: return "Cooling";
    case Subsystem::Power: return "Power";
    case Subsystem::Vacuum: return "Vacuum";
    case Subsystem::Klystron: return "Klystron";
  }
  return "?";
}

inline std::optional<Subsystem> subsystem_from_string(std::string_view s) {
  if (s == "Cooling") return Subsystem::Cooling;
  if (s == "Power") return Subsystem::Power;
  if (s == "Vacuum") return Subsystem::Vacuum;
  if (s == "Klystron") return Subsystem::Klystron;
  return std::nullopt;
}

enum class Direction { Above, Below };

inline const char* to_string(Direction d) { return d == Direction::Above ? "above" : "below"; }

struct AnomalyContext {
  sim::PvId pv;
  int tick = 0;
  double observed = 0.0;
  double baseline = 0.0;
  double deviation = 0.0;  // observed - baseline
  Direction direction = Direction::Above;

  static AnomalyContext make(sim::PvId pv, int tick, double observed, double baseline) {
    const double deviation = observed - baseline;
    return AnomalyContext{std::move(pv), tick, observed, baseline, deviation,
                          deviation < 0.0 ? Direction::Below : Direction::Above};
  }
};

enum class GenerationSource { Rule, Remote };

inline const char* to_string(GenerationSource s) { return s == GenerationSource::Rule ? "rule" : "remote"; }

struct Classification {
  Subsystem suspected_system;
  GenerationSource source = GenerationSource::Rule;
  std::optional<std::string> raw_response;    // verbatim backend reply, audit only
  std::optional<std::string> fallback_reason;  // set when a remote backend fell back to rules
};

class TheoryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CausalTheory {
  Proposition root_cause;
  std::vector<Proposition> effects;
  std::string narrative;
  GenerationSource source = GenerationSource::Rule;
  std::optional<std::string> fallback_reason;

  /// Root plus effects, the set of report-level atoms the theory accounts for.
  std::set<Proposition> chain() const {
    std::set<Proposition> out(effects.begin(), effects.end());
    out.insert(root_cause);
    return out;
  }

  bool same_chain(const CausalTheory& other) const {
    return root_cause == other.root_cause && effects == other.effects;
  }
};

/// Enforces the theory invariants: closed vocabulary, root not among the
/// effects, no repeated effects.
inline void validate(const CausalTheory& t) {
  const auto vocabulary = vocab::global_vocabulary();
  if (!vocabulary.contains(t.root_cause))
    throw TheoryError("root cause '" + t.root_cause.name() + "' is outside the vocabulary");
  std::set<Proposition> seen;
  for (const auto& e : t.effects) {
    if (!vocabulary.contains(e)) throw TheoryError("effect '" + e.name() + "' is outside the vocabulary");
    if (e == t.root_cause) throw TheoryError("root cause '" + e.name() + "' listed among its own effects");
    if (!seen.insert(e).second) throw TheoryError("effect '" + e.name() + "' listed twice");
  }
}

}  // namespace kdiag::hypo
