#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "muval/program.hpp"

namespace muval {

/// Guarded relation of one labelled step over the state variables and their
/// primed copies (`x` and `x'`).
struct Transition {
  Symbol label;
  Expr relation;
};

/// Labels are those of the transitions, in order of first appearance.
/// Several transitions may share a label; their relations are disjoined.
struct SymbolicLts {
  std::vector<Param> vars;
  std::vector<Transition> transitions;
  Expr init;  ///< `true` unless given.

  std::vector<Symbol> labels() const;
  /// Disjunction of the label's relations with `from`/`to` substituted for
  /// the unprimed/primed variables (false for an unknown label).
  Expr step(Symbol label, const std::vector<Expr>& from, const std::vector<Expr>& to) const;
};

/// An edge with an empty label matches every label.
struct BuchiEdge {
  Symbol from;
  Symbol label;
  Symbol to;
};

struct BuchiAutomaton {
  std::vector<Symbol> states;
  Symbol init;
  std::set<Symbol> final;
  std::vector<BuchiEdge> edges;

  /// Successors in edge order, without duplicates.
  std::vector<Symbol> delta(Symbol q, Symbol label) const;
};

enum class Objective { Safety, Reach, Ltl };

struct GameSpec {
  SymbolicLts lts;
  std::set<Symbol> exists_labels;
  std::set<Symbol> forall_labels;
  Objective objective = Objective::Safety;
  Expr target;  ///< Safe or reach predicate over the state variables.
  std::optional<BuchiAutomaton> automaton;
};

/// `vars x: int, ...;`, `trans LABEL: phi;`, optional `init phi;`.
SymbolicLts parse_lts(std::string_view text);
/// As `.lts` with `trans LABEL exists|forall: phi;` and one of `safe phi;`,
/// `reach phi;` or `ltl;`.
GameSpec parse_game(std::string_view text);
/// `states q, ...;`, `init q;`, `final q, ...;`, `q -> q' : l1, l2 | *;`.
BuchiAutomaton parse_buchi(std::string_view text);

/// Predicate name of the automaton-state pair (q, kind).
Symbol automaton_predicate(Symbol q, Fixpoint kind);

/// Every execution from an initial state has a label sequence accepted by the
/// automaton. Equations exist for the pairs reachable from (init, nu); within
/// each strongly connected component nu-equations precede mu-equations.
Program encode_buchi(const SymbolicLts& lts, const BuchiAutomaton& a);
/// The existential player keeps every visited state safe.
Program encode_safety_game(const GameSpec& g);
/// The existential player forces a visit to a reach state.
Program encode_reachability_game(const GameSpec& g);
/// The existential player forces an accepted label sequence. Each round is a
/// universal move followed by an existential move.
Program encode_ltl_game(const GameSpec& g);

/// Negation of the safety game's validity as a reachability game for the
/// opposite player. The universal player's first move is kept in the query.
Program safety_complement_as_reachability(const GameSpec& g);

enum class BisimQueryKind { Pairs, Lower, Upper };

/// Pairs: the listed state pairs are bisimilar. Lower: phi implies
/// bisimilarity. Upper: bisimilarity implies phi, via the complement relation.
struct BisimQuery {
  BisimQueryKind kind = BisimQueryKind::Pairs;
  std::vector<std::vector<std::int64_t>> pairs;  ///< First system's values, then the second's.
  Expr formula;                                   ///< Over bisim_vars(...).
};

/// Parameters of the relation: the first system's variables suffixed with
/// 1, then the second's suffixed with 2.
std::vector<Param> bisim_vars(const SymbolicLts& a, const SymbolicLts& b);
Program encode_bisimulation(const SymbolicLts& a, const SymbolicLts& b, const BisimQuery& q);

}  // namespace muval
