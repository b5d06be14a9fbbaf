#pragma once

// Brute-force reference evaluator over a bitmask representation that shares
// nothing with the kernel: worlds are indices, valuations are bitsets, and
// formulas are evaluated by labeling every world bottom-up.

#include <array>
#include <bitset>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "kripkediag/formula.hpp"
#include "kripkediag/kripke_model.hpp"

namespace oracle {

constexpr int kMaxWorlds = 5;
constexpr int kAtoms = 6;
inline const std::array<const char*, kAtoms> kAtomNames{"p", "q", "r", "s", "t", "u"};

using WorldSet = std::bitset<kMaxWorlds>;

struct Frame {
  int n = 1;
  std::array<std::bitset<kAtoms>, kMaxWorlds> val{};
  std::array<WorldSet, kMaxWorlds> succ{};
};

enum class Op { Atom, Not, And, Or, Implies, Box, Diamond };

struct Term {
  Op op = Op::Atom;
  int atom = 0;
  std::shared_ptr<Term> a, b;
};
using TermPtr = std::shared_ptr<Term>;

inline TermPtr mk(Op op, TermPtr a = nullptr, TermPtr b = nullptr, int atom = 0) {
  auto t = std::make_shared<Term>();
  t->op = op;
  t->a = std::move(a);
  t->b = std::move(b);
  t->atom = atom;
  return t;
}

inline WorldSet label(const Frame& m, const Term& t) {
  WorldSet out;
  switch (t.op) {
    case Op::Atom:
      for (int w = 0; w < m.n; ++w) out[w] = m.val[w][t.atom];
      return out;
    case Op::Not: {
      auto s = label(m, *t.a);
      for (int w = 0; w < m.n; ++w) out[w] = !s[w];
      return out;
    }
    case Op::And: return label(m, *t.a) & label(m, *t.b);
    case Op::Or: return label(m, *t.a) | label(m, *t.b);
    case Op::Implies: {
      auto l = label(m, *t.a), r = label(m, *t.b);
      for (int w = 0; w < m.n; ++w) out[w] = !l[w] || r[w];
      return out;
    }
    case Op::Box: {
      auto s = label(m, *t.a);
      for (int w = 0; w < m.n; ++w) out[w] = (m.succ[w] & ~s).none();
      return out;
    }
    case Op::Diamond: {
      auto s = label(m, *t.a);
      for (int w = 0; w < m.n; ++w) out[w] = (m.succ[w] & s).any();
      return out;
    }
  }
  return out;
}

inline TermPtr random_term(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> atom(0, kAtoms - 1);
  if (depth == 0 || std::bernoulli_distribution(0.2)(rng)) return mk(Op::Atom, nullptr, nullptr, atom(rng));
  switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
    case 0: return mk(Op::Not, random_term(rng, depth - 1));
    case 1: return mk(Op::And, random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 2: return mk(Op::Or, random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 3: return mk(Op::Implies, random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 4: return mk(Op::Box, random_term(rng, depth - 1));
    default: return mk(Op::Diamond, random_term(rng, depth - 1));
  }
}

inline Frame random_frame(std::mt19937_64& rng) {
  Frame m;
  m.n = std::uniform_int_distribution<int>(1, kMaxWorlds)(rng);
  std::bernoulli_distribution coin(0.4);
  for (int w = 0; w < m.n; ++w) {
    for (int a = 0; a < kAtoms; ++a) m.val[w][a] = coin(rng);
    for (int v = 0; v < m.n; ++v) m.succ[w][v] = coin(rng);
  }
  return m;
}

inline std::string world_name(int w) { return "w" + std::to_string(w); }

inline kdiag::modal::KripkeModel to_kernel(const Frame& m) {
  using namespace kdiag::modal;
  std::map<WorldId, Valuation> worlds;
  std::set<Edge> edges;
  std::set<Proposition> vocab;
  for (auto name : kAtomNames) vocab.emplace(name);
  for (int w = 0; w < m.n; ++w) {
    Valuation v;
    for (int a = 0; a < kAtoms; ++a)
      if (m.val[w][a]) v.emplace(kAtomNames[a]);
    worlds.emplace(world_name(w), std::move(v));
    for (int u = 0; u < m.n; ++u)
      if (m.succ[w][u]) edges.emplace(world_name(w), world_name(u));
  }
  return KripkeModel(std::move(worlds), std::move(edges), world_name(0), std::move(vocab));
}

inline kdiag::modal::Formula to_kernel(const Term& t) {
  using kdiag::modal::Formula;
  switch (t.op) {
    case Op::Atom: return Formula::atom(kAtomNames[t.atom]);
    case Op::Not: return Formula::negation(to_kernel(*t.a));
    case Op::And: return Formula::conjunction(to_kernel(*t.a), to_kernel(*t.b));
    case Op::Or: return Formula::disjunction(to_kernel(*t.a), to_kernel(*t.b));
    case Op::Implies: return Formula::implication(to_kernel(*t.a), to_kernel(*t.b));
    case Op::Box: return Formula::box(to_kernel(*t.a));
    case Op::Diamond: return Formula::diamond(to_kernel(*t.a));
  }
  return Formula::atom("p");
}

inline kdiag::modal::Formula random_formula(std::mt19937_64& rng, int depth) {
  return to_kernel(*random_term(rng, depth));
}

}  // namespace oracle
