#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "kripkediag/proposition.hpp"

namespace kdiag::modal {

enum class FormulaKind { Atom, Not, And, Or, Implies, Box, Diamond };

inline bool is_unary(FormulaKind k) noexcept {
  return k == FormulaKind::Not || k == FormulaKind::Box || k == FormulaKind::Diamond;
}

inline bool is_binary(FormulaKind k) noexcept {
  return k == FormulaKind::And || k == FormulaKind::Or || k == FormulaKind::Implies;
}

/// Immutable modal formula. Subtrees are shared, so copies are cheap and
/// equality is structural.
class Formula {
 public:
  static Formula atom(Proposition p);
  static Formula atom(std::string name) { return atom(Proposition(std::move(name))); }
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula box(Formula f);
  static Formula diamond(Formula f);

  FormulaKind kind() const noexcept;

  // Accessors below throw std::logic_error when called on the wrong kind.
  const Proposition& proposition() const;
  const Formula& operand() const;
  const Formula& lhs() const;
  const Formula& rhs() const;

  std::size_t depth() const;
  void collect_atoms(std::set<Proposition>& out) const;
  std::set<Proposition> atoms() const {
    std::set<Proposition> out;
    collect_atoms(out);
    return out;
  }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(FormulaKind kind, std::optional<Proposition> atom, std::optional<Formula> lhs,
                      std::optional<Formula> rhs);

  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  FormulaKind kind;
  std::optional<Proposition> atom;
  std::optional<Formula> lhs;  // also the operand of unary nodes
  std::optional<Formula> rhs;
};

inline Formula Formula::make(FormulaKind kind, std::optional<Proposition> atom,
                             std::optional<Formula> lhs, std::optional<Formula> rhs) {
  return Formula(std::make_shared<const Node>(
      Node{kind, std::move(atom), std::move(lhs), std::move(rhs)}));
}

inline Formula Formula::atom(Proposition p) {
  return make(FormulaKind::Atom, std::move(p), std::nullopt, std::nullopt);
}
inline Formula Formula::negation(Formula f) {
  return make(FormulaKind::Not, std::nullopt, std::move(f), std::nullopt);
}
inline Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return make(FormulaKind::And, std::nullopt, std::move(lhs), std::move(rhs));
}
inline Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return make(FormulaKind::Or, std::nullopt, std::move(lhs), std::move(rhs));
}
inline Formula Formula::implication(Formula lhs, Formula rhs) {
  return make(FormulaKind::Implies, std::nullopt, std::move(lhs), std::move(rhs));
}
inline Formula Formula::box(Formula f) {
  return make(FormulaKind::Box, std::nullopt, std::move(f), std::nullopt);
}
inline Formula Formula::diamond(Formula f) {
  return make(FormulaKind::Diamond, std::nullopt, std::move(f), std::nullopt);
}

inline FormulaKind Formula::kind() const noexcept { return node_->kind; }

inline const Proposition& Formula::proposition() const {
  if (kind() != FormulaKind::Atom) throw std::logic_error("proposition() on non-atom formula");
  return *node_->atom;
}

inline const Formula& Formula::operand() const {
  if (!is_unary(kind())) throw std::logic_error("operand() on non-unary formula");
  return *node_->lhs;
}

inline const Formula& Formula::lhs() const {
  if (!is_binary(kind())) throw std::logic_error("lhs() on non-binary formula");
  return *node_->lhs;
}

inline const Formula& Formula::rhs() const {
  if (!is_binary(kind())) throw std::logic_error("rhs() on non-binary formula");
  return *node_->rhs;
}

inline std::size_t Formula::depth() const {
  if (kind() == FormulaKind::Atom) return 0;
  if (is_unary(kind())) return 1 + operand().depth();
  return 1 + std::max(lhs().depth(), rhs().depth());
}

inline void Formula::collect_atoms(std::set<Proposition>& out) const {
  if (kind() == FormulaKind::Atom) {
    out.insert(proposition());
  } else if (is_unary(kind())) {
    operand().collect_atoms(out);
  } else {
    lhs().collect_atoms(out);
    rhs().collect_atoms(out);
  }
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() == FormulaKind::Atom) return a.proposition() == b.proposition();
  if (is_unary(a.kind())) return a.operand() == b.operand();
  return a.lhs() == b.lhs() && a.rhs() == b.rhs();
}

}  // namespace kdiag::modal
