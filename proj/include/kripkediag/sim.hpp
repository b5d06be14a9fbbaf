#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kdiag::sim {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Process-variable name of the form "SUBSYSTEM:signal".
class PvId {
 public:
  explicit PvId(std::string name) : name_(std::move(name)) {
    auto colon = name_.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == name_.size() ||
        name_.find(':', colon + 1) != std::string::npos)
      throw ScenarioError("invalid PV id '" + name_ + "'");
  }

  const std::string& name() const noexcept { return name_; }
  std::string_view subsystem() const { return std::string_view(name_).substr(0, name_.find(':')); }
  std::string_view signal() const { return std::string_view(name_).substr(name_.find(':') + 1); }

  friend bool operator==(const PvId&, const PvId&) = default;
  friend auto operator<=>(const PvId&, const PvId&) = default;

 private:
  std::string name_;
};

struct PvSpec {
  PvId id;
  double baseline = 0.0;
  double noise_amplitude = 0.0;  // half-width of the uniform noise band
  std::string units;
};

enum class CouplingMode { Instant, Ramp };

/// Linear dependency of `target` on `source`. Instant couplings add
/// gain * (source deviation); ramp couplings add ramp_rate every tick the
/// source deviates. Both look at the source `delay_ticks` ticks back.
struct CouplingRule {
  PvId source;
  PvId target;
  double gain = 0.0;
  int delay_ticks = 0;
  CouplingMode mode = CouplingMode::Instant;
  double ramp_rate = 0.0;
};

enum class FaultKind { Stuck, Step };

/// Stuck pins the target's truth at `magnitude` for the rest of the run;
/// step adds `magnitude` to the target once, from `tick` on.
struct FaultSpec {
  int tick = 0;
  PvId target;
  FaultKind kind = FaultKind::Step;
  double magnitude = 0.0;
};

struct ScenarioSpec {
  std::string id;
  int duration_ticks = 0;
  std::vector<PvSpec> pvs;
  std::vector<CouplingRule> couplings;
  std::vector<FaultSpec> faults;
  std::uint64_t seed = 0;
};

struct TickRecord {
  int tick = 0;
  std::map<PvId, double> values;  // observed, with noise
  std::map<PvId, double> truth;   // noise-free

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

/// PV indices (into spec.pvs) in a topological order of the coupling graph.
/// Ties are broken by PV name. Throws ScenarioError on a cycle.
inline std::vector<std::size_t> coupling_order(const ScenarioSpec& spec) {
  std::map<PvId, std::size_t> index;
  for (std::size_t i = 0; i < spec.pvs.size(); ++i) index.emplace(spec.pvs[i].id, i);

  std::vector<std::size_t> indegree(spec.pvs.size(), 0);
  std::vector<std::vector<std::size_t>> out(spec.pvs.size());
  for (const auto& c : spec.couplings) {
    auto s = index.at(c.source);
    auto t = index.at(c.target);
    out[s].push_back(t);
    ++indegree[t];
  }

  auto by_name = [&](std::size_t a, std::size_t b) { return spec.pvs[a].id < spec.pvs[b].id; };
  std::set<std::size_t, decltype(by_name)> ready(by_name);
  for (std::size_t i = 0; i < spec.pvs.size(); ++i)
    if (indegree[i] == 0) ready.insert(i);

  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (auto t : out[i])
      if (--indegree[t] == 0) ready.insert(t);
  }
  if (order.size() != spec.pvs.size()) throw ScenarioError("coupling graph of '" + spec.id + "' has a cycle");
  return order;
}

inline void validate(const ScenarioSpec& spec) {
  if (spec.duration_ticks <= 0) throw ScenarioError("duration_ticks must be positive");
  std::set<PvId> ids;
  for (const auto& pv : spec.pvs) {
    if (!ids.insert(pv.id).second) throw ScenarioError("duplicate PV '" + pv.id.name() + "'");
    if (!(pv.noise_amplitude >= 0.0)) throw ScenarioError("negative noise amplitude on '" + pv.id.name() + "'");
  }
  auto known = [&](const PvId& id, const char* what) {
    if (!ids.contains(id)) throw ScenarioError(std::string(what) + " references unknown PV '" + id.name() + "'");
  };
  for (const auto& c : spec.couplings) {
    known(c.source, "coupling");
    known(c.target, "coupling");
    if (c.delay_ticks < 0) throw ScenarioError("negative coupling delay");
    if (c.mode == CouplingMode::Ramp && c.ramp_rate == 0.0)
      throw ScenarioError("ramp coupling needs a nonzero ramp_rate");
  }
  for (const auto& f : spec.faults) {
    known(f.target, "fault");
    if (f.tick < 0 || f.tick >= spec.duration_ticks)
      throw ScenarioError("fault tick " + std::to_string(f.tick) + " outside scenario duration");
  }
  coupling_order(spec);
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// std::uniform_real_distribution is not specified bit-exactly across
// standard libraries, so the draw is done by hand: 53 random bits -> [0, 1).
inline double uniform_symmetric(std::mt19937_64& rng, double half_width) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return half_width * (2.0 * u - 1.0);
}

}  // namespace detail

/// Per-PV noise stream: independent of every other PV in the scenario.
inline std::mt19937_64 noise_stream(std::uint64_t seed, const PvId& pv) {
  return std::mt19937_64(detail::splitmix64(seed ^ detail::fnv1a(pv.name())));
}

class SimState {
 public:
  explicit SimState(ScenarioSpec spec) {
    validate(spec);
    order_ = coupling_order(spec);
    channels_.reserve(spec.pvs.size());
    for (const auto& pv : spec.pvs) channels_.push_back(Channel{0.0, std::nullopt, 0.0, {}, noise_stream(spec.seed, pv.id)});
    spec_ = std::make_shared<const ScenarioSpec>(std::move(spec));
  }

  int tick() const noexcept { return tick_; }
  const ScenarioSpec& spec() const noexcept { return *spec_; }
  bool finished() const noexcept { return tick_ >= spec_->duration_ticks; }

  friend std::pair<SimState, TickRecord> step(const SimState& state);

 private:
  struct Channel {
    double step_offset;
    std::optional<double> stuck;
    double ramp;
    std::vector<double> history;  // truth per elapsed tick
    std::mt19937_64 rng;
  };

  std::shared_ptr<const ScenarioSpec> spec_;
  std::vector<std::size_t> order_;
  std::vector<Channel> channels_;
  int tick_ = 0;
};

/// Advances one tick: faults, then couplings in topological order, then noise.
inline std::pair<SimState, TickRecord> step(const SimState& state) {
  if (state.finished())
    throw ScenarioError("cannot step scenario '" + state.spec().id + "' past its duration");

  SimState next = state;
  const ScenarioSpec& spec = *next.spec_;
  const int t = next.tick_;

  auto index_of = [&](const PvId& id) {
    for (std::size_t i = 0; i < spec.pvs.size(); ++i)
      if (spec.pvs[i].id == id) return i;
    throw ScenarioError("unknown PV '" + id.name() + "'");
  };

  for (const auto& fault : spec.faults) {
    if (fault.tick != t) continue;
    auto& ch = next.channels_[index_of(fault.target)];
    if (fault.kind == FaultKind::Stuck)
      ch.stuck = fault.magnitude;
    else
      ch.step_offset += fault.magnitude;
  }

  for (auto i : next.order_) {
    const PvSpec& pv = spec.pvs[i];
    auto& ch = next.channels_[i];
    double instant = 0.0;
    for (const auto& c : spec.couplings) {
      if (c.target != pv.id) continue;
      auto s = index_of(c.source);
      const int at = t - c.delay_ticks;
      const double deviation =
          at < 0 ? 0.0 : next.channels_[s].history[static_cast<std::size_t>(at)] - spec.pvs[s].baseline;
      if (c.mode == CouplingMode::Instant)
        instant += c.gain * deviation;
      else if (std::abs(deviation) > 1e-12)
        ch.ramp += c.ramp_rate;
    }
    const double truth = ch.stuck ? *ch.stuck : pv.baseline + ch.step_offset + ch.ramp + instant;
    ch.history.push_back(truth);
  }

  TickRecord record;
  record.tick = t;
  for (std::size_t i = 0; i < spec.pvs.size(); ++i) {
    auto& ch = next.channels_[i];
    const double truth = ch.history.back();
    record.truth.emplace(spec.pvs[i].id, truth);
    record.values.emplace(spec.pvs[i].id, truth + detail::uniform_symmetric(ch.rng, spec.pvs[i].noise_amplitude));
  }

  ++next.tick_;
  return {std::move(next), std::move(record)};
}

inline std::vector<TickRecord> run_scenario(const ScenarioSpec& spec) {
  std::vector<TickRecord> records;
  SimState state(spec);
  while (!state.finished()) {
    auto [next, record] = step(state);
    records.push_back(std::move(record));
    state = std::move(next);
  }
  return records;
}

}  // namespace kdiag::sim
