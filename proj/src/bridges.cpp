#include "ccall/bridges.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <vector>

namespace ccall {

bool is_builtin(const PredId& pred) {
  static const std::set<PredId> builtins = {
      {"true", 0},  {"fail", 0},    {"call", 1},   {",", 2},
      {"is", 2},    {"<", 2},       {"=<", 2},     {">", 2},
      {">=", 2},    {"=:=", 2},     {"=", 2},      {"\\=", 2},
      {"slg", 1},   {"slgcall", 1}, {"answer", 2},
  };
  return builtins.contains(pred);
}

namespace {

void add_goal_edges(const PredId& caller, const Term& goal, CallGraph& g) {
  if (!goal.is_callable()) return;
  PredId callee = pred_of(goal);
  if (callee == PredId{"call", 1} || callee == PredId{",", 2}) {
    for (const auto& a : goal.args()) add_goal_edges(caller, a, g);
    return;
  }
  if (is_builtin(callee)) return;
  g.nodes.insert(callee);
  g.edges.emplace(caller, callee);
}

std::set<PredId> traverse(
    const PredId& start,
    const std::map<PredId, std::vector<PredId>>& adjacency) {
  std::set<PredId> seen;
  std::vector<PredId> stack;
  auto push_neighbours = [&](const PredId& p) {
    auto it = adjacency.find(p);
    if (it == adjacency.end()) return;
    for (const auto& q : it->second) {
      if (seen.insert(q).second) stack.push_back(q);
    }
  };
  push_neighbours(start);
  while (!stack.empty()) {
    PredId p = stack.back();
    stack.pop_back();
    push_neighbours(p);
  }
  return seen;
}

}  // namespace

std::set<PredId> CallGraph::successors(const PredId& p) const {
  std::set<PredId> out;
  for (auto it = edges.lower_bound({p, PredId{}});
       it != edges.end() && it->first == p; ++it) {
    out.insert(it->second);
  }
  return out;
}

std::set<PredId> CallGraph::reachable_from(const PredId& from) const {
  std::map<PredId, std::vector<PredId>> forward;
  for (const auto& [a, b] : edges) forward[a].push_back(b);
  return traverse(from, forward);
}

std::set<PredId> CallGraph::reaching(const PredId& to) const {
  std::map<PredId, std::vector<PredId>> backward;
  for (const auto& [a, b] : edges) backward[b].push_back(a);
  return traverse(to, backward);
}

CallGraph build_call_graph(const Program& p) {
  CallGraph g;
  for (const auto& pred : p.tabled) g.nodes.insert(pred);
  for (const auto& pred : p.bridges) g.nodes.insert(pred);
  for (const auto& c : p.clauses) {
    PredId caller = c.pred();
    g.nodes.insert(caller);
    for (const auto& goal : c.body) add_goal_edges(caller, goal, g);
  }
  return g;
}

std::set<PredId> find_bridges(const Program& p, const CallGraph& g) {
  std::map<PredId, std::vector<PredId>> forward;
  std::map<PredId, std::vector<PredId>> backward;
  for (const auto& [a, b] : g.edges) {
    forward[a].push_back(b);
    backward[b].push_back(a);
  }

  std::set<PredId> bridges;
  for (const auto& t : p.tabled) {
    std::set<PredId> fwd = traverse(t, forward);
    std::set<PredId> bwd = traverse(t, backward);
    std::set_intersection(fwd.begin(), fwd.end(), bwd.begin(), bwd.end(),
                          std::inserter(bridges, bridges.end()));
  }
  for (const auto& t : p.tabled) bridges.erase(t);
  return bridges;
}

Program with_computed_bridges(Program p) {
  std::set<PredId> computed = find_bridges(p, build_call_graph(p));
  p.bridges.insert(computed.begin(), computed.end());
  return p;
}

}  // namespace ccall
