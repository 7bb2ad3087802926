#pragma once

#include <set>
#include <utility>

#include "ccall/term.hpp"

namespace ccall {

/// Built-in and tabling-primitive predicates. These never appear as call
/// graph nodes.
bool is_builtin(const PredId& pred);

/// Predicate-level call graph. Node and edge sets are ordered, so iteration
/// is deterministic.
struct CallGraph {
  std::set<PredId> nodes;
  std::set<std::pair<PredId, PredId>> edges;  // (caller, callee)

  /// Callees of `p` (one edge).
  std::set<PredId> successors(const PredId& p) const;
  /// Predicates reachable from `from` through one or more edges.
  std::set<PredId> reachable_from(const PredId& from) const;
  /// Predicates from which `to` is reachable through one or more edges.
  std::set<PredId> reaching(const PredId& to) const;
};

/// Nodes are all clause heads, all non-builtin callees and all declared
/// predicates. A `call(G)` goal with a callable `G` contributes an edge to
/// `G`'s predicate.
CallGraph build_call_graph(const Program& p);

/// Safe over-approximation of the bridge predicates: for each tabled T,
/// everything that both is reachable from T and reaches T, minus the tabled
/// predicates themselves.
std::set<PredId> find_bridges(const Program& p, const CallGraph& g);

/// `p` with its bridge set replaced by declared ∪ computed bridges.
Program with_computed_bridges(Program p);

}  // namespace ccall
