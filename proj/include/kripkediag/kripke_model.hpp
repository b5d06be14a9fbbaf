#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kripkediag/formula.hpp"
#include "kripkediag/proposition.hpp"

namespace kdiag::modal {

using WorldId = std::string;
using Valuation = std::set<Proposition>;
using Edge = std::pair<WorldId, WorldId>;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownWorldError : public ModelError {
 public:
  explicit UnknownWorldError(WorldId id)
      : ModelError("unknown world '" + id + "'"), world_(std::move(id)) {}
  const WorldId& world() const noexcept { return world_; }

 private:
  WorldId world_;
};

class UnknownAtomError : public ModelError {
 public:
  explicit UnknownAtomError(Proposition p)
      : ModelError("atom '" + p.name() + "' is not in the model vocabulary"), atom_(std::move(p)) {}
  const Proposition& atom() const noexcept { return atom_; }

 private:
  Proposition atom_;
};

/// A finite Kripke model anchored at a current world. Immutable once built;
/// all updates go through the free functions below and return new values.
class KripkeModel {
 public:
  KripkeModel(std::map<WorldId, Valuation> worlds, std::set<Edge> accessibility, WorldId current,
              std::set<Proposition> vocabulary)
      : worlds_(std::move(worlds)),
        accessibility_(std::move(accessibility)),
        current_(std::move(current)),
        vocabulary_(std::move(vocabulary)) {
    if (!worlds_.contains(current_)) throw UnknownWorldError(current_);
    for (const auto& [from, to] : accessibility_) {
      if (!worlds_.contains(from)) throw UnknownWorldError(from);
      if (!worlds_.contains(to)) throw UnknownWorldError(to);
    }
    for (const auto& [id, valuation] : worlds_) {
      if (id.empty()) throw ModelError("world id must be non-empty");
      for (const auto& p : valuation)
        if (!vocabulary_.contains(p)) throw UnknownAtomError(p);
    }
  }

  const std::map<WorldId, Valuation>& worlds() const noexcept { return worlds_; }
  const std::set<Edge>& accessibility() const noexcept { return accessibility_; }
  const WorldId& current() const noexcept { return current_; }
  const std::set<Proposition>& vocabulary() const noexcept { return vocabulary_; }

  bool has_world(const WorldId& id) const { return worlds_.contains(id); }

  const Valuation& valuation(const WorldId& id) const {
    auto it = worlds_.find(id);
    if (it == worlds_.end()) throw UnknownWorldError(id);
    return it->second;
  }

  std::vector<WorldId> successors(const WorldId& id) const {
    std::vector<WorldId> out;
    for (auto it = accessibility_.lower_bound(Edge{id, WorldId{}});
         it != accessibility_.end() && it->first == id; ++it)
      out.push_back(it->second);
    return out;
  }

  friend bool operator==(const KripkeModel&, const KripkeModel&) = default;

 private:
  std::map<WorldId, Valuation> worlds_;
  std::set<Edge> accessibility_;
  WorldId current_;
  std::set<Proposition> vocabulary_;
};

namespace detail {

inline void require_vocabulary(const KripkeModel& model, const Formula& f) {
  for (const auto& atom : f.atoms())
    if (!model.vocabulary().contains(atom)) throw UnknownAtomError(atom);
}

inline bool eval_unchecked(const KripkeModel& model, const WorldId& world, const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      return model.valuation(world).contains(f.proposition());
    case FormulaKind::Not:
      return !eval_unchecked(model, world, f.operand());
    case FormulaKind::And:
      return eval_unchecked(model, world, f.lhs()) && eval_unchecked(model, world, f.rhs());
    case FormulaKind::Or:
      return eval_unchecked(model, world, f.lhs()) || eval_unchecked(model, world, f.rhs());
    case FormulaKind::Implies:
      return !eval_unchecked(model, world, f.lhs()) || eval_unchecked(model, world, f.rhs());
    case FormulaKind::Box:
      for (const auto& next : model.successors(world))
        if (!eval_unchecked(model, next, f.operand())) return false;
      return true;
    case FormulaKind::Diamond:
      for (const auto& next : model.successors(world))
        if (eval_unchecked(model, next, f.operand())) return true;
      return false;
  }
  throw std::logic_error("unreachable formula kind");
}

}  // namespace detail

/// Truth of `f` at `world` under plain K semantics. A world without
/// successors satisfies every [] formula and no <> formula.
inline bool eval_at(const KripkeModel& model, const WorldId& world, const Formula& f) {
  if (!model.has_world(world)) throw UnknownWorldError(world);
  detail::require_vocabulary(model, f);
  return detail::eval_unchecked(model, world, f);
}

struct Axiom {
  std::string label;
  Formula formula;

  friend bool operator==(const Axiom&, const Axiom&) = default;
};

/// Ordered list of labelled axioms; labels are unique.
class AxiomSet {
 public:
  AxiomSet() = default;
  explicit AxiomSet(std::vector<Axiom> axioms) {
    for (auto& a : axioms) add(std::move(a.label), std::move(a.formula));
  }

  void add(std::string label, Formula formula) {
    for (const auto& a : axioms_)
      if (a.label == label) throw std::invalid_argument("duplicate axiom label '" + label + "'");
    axioms_.push_back(Axiom{std::move(label), std::move(formula)});
  }

  const std::vector<Axiom>& axioms() const noexcept { return axioms_; }
  bool empty() const noexcept { return axioms_.empty(); }
  std::size_t size() const noexcept { return axioms_.size(); }

  auto begin() const noexcept { return axioms_.begin(); }
  auto end() const noexcept { return axioms_.end(); }

 private:
  std::vector<Axiom> axioms_;
};

struct Violation {
  std::string axiom;
  WorldId world;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool violates(std::string_view label) const {
    for (const auto& v : violations)
      if (v.axiom == label) return true;
    return false;
  }
};

/// Checks every axiom at every world of the model (global validity).
inline ValidationResult check_axioms(const KripkeModel& model, const AxiomSet& axioms) {
  for (const auto& axiom : axioms) detail::require_vocabulary(model, axiom.formula);
  ValidationResult result;
  for (const auto& axiom : axioms)
    for (const auto& [world, valuation] : model.worlds())
      if (!detail::eval_unchecked(model, world, axiom.formula))
        result.violations.push_back(Violation{axiom.label, world});
  return result;
}

/// Placeholder usable in HypotheticalUpdate edges and new_current to name the
/// freshly allocated world when `target` is empty.
inline constexpr std::string_view kNewWorld = "@new";

struct HypotheticalUpdate {
  std::optional<WorldId> target;  // nullopt allocates a fresh world
  Valuation add;
  Valuation remove;
  std::set<Edge> new_edges;
  std::optional<WorldId> new_current;
};

/// Smallest w<k> not already used as a world id.
inline WorldId fresh_world_id(const KripkeModel& model) {
  for (std::size_t k = 0;; ++k) {
    WorldId id = "w" + std::to_string(k);
    if (!model.has_world(id)) return id;
  }
}

/// Returns the model with the update applied; `model` itself is untouched.
inline KripkeModel with_hypothesis(const KripkeModel& model, const HypotheticalUpdate& update) {
  for (const auto& p : update.add)
    if (!model.vocabulary().contains(p)) throw UnknownAtomError(p);

  auto worlds = model.worlds();
  WorldId target;
  if (update.target) {
    if (!model.has_world(*update.target)) throw UnknownWorldError(*update.target);
    target = *update.target;
  } else {
    target = fresh_world_id(model);
    worlds.emplace(target, Valuation{});
  }

  auto& valuation = worlds.at(target);
  valuation.insert(update.add.begin(), update.add.end());
  for (const auto& p : update.remove) valuation.erase(p);

  auto resolve = [&](const WorldId& id) { return id == kNewWorld ? target : id; };

  auto accessibility = model.accessibility();
  for (const auto& [from, to] : update.new_edges) {
    Edge edge{resolve(from), resolve(to)};
    if (!worlds.contains(edge.first)) throw UnknownWorldError(edge.first);
    if (!worlds.contains(edge.second)) throw UnknownWorldError(edge.second);
    accessibility.insert(std::move(edge));
  }

  WorldId current = update.new_current ? resolve(*update.new_current) : model.current();
  return KripkeModel(std::move(worlds), std::move(accessibility), std::move(current),
                     model.vocabulary());
}

class PruneError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Restricts the model to `keep`. Never adds worlds or edges.
inline KripkeModel prune_worlds(const KripkeModel& model, const std::set<WorldId>& keep) {
  for (const auto& id : keep)
    if (!model.has_world(id)) throw UnknownWorldError(id);
  if (!keep.contains(model.current()))
    throw PruneError("cannot prune the current world '" + model.current() + "'");

  std::map<WorldId, Valuation> worlds;
  for (const auto& id : keep) worlds.emplace(id, model.valuation(id));
  std::set<Edge> accessibility;
  for (const auto& edge : model.accessibility())
    if (keep.contains(edge.first) && keep.contains(edge.second)) accessibility.insert(edge);
  return KripkeModel(std::move(worlds), std::move(accessibility), model.current(),
                     model.vocabulary());
}

struct CommitResult {
  KripkeModel belief;  // candidate when accepted, otherwise the prior model
  ValidationResult validation;

  bool accepted() const noexcept { return validation.ok(); }
};

inline CommitResult commit(const KripkeModel& model, const KripkeModel& candidate,
                           const AxiomSet& axioms) {
  auto validation = check_axioms(candidate, axioms);
  if (validation.ok()) return CommitResult{candidate, std::move(validation)};
  return CommitResult{model, std::move(validation)};
}

}  // namespace kdiag::modal
