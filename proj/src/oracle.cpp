#include "ccall/oracle.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "ccall/error.hpp"
#include "ccall/syntax.hpp"

namespace ccall {

bool GroundFactStore::insert(const Term& fact) {
  if (!facts_[pred_of(fact)].insert(fact).second) return false;
  ++size_;
  return true;
}

bool GroundFactStore::contains(const Term& fact) const {
  auto it = facts_.find(pred_of(fact));
  return it != facts_.end() && it->second.contains(fact);
}

const std::set<Term>& GroundFactStore::facts(const PredId& p) const {
  static const std::set<Term> empty;
  auto it = facts_.find(p);
  return it == facts_.end() ? empty : it->second;
}

std::set<PredId> GroundFactStore::predicates() const {
  std::set<PredId> out;
  for (const auto& [p, _] : facts_) out.insert(p);
  return out;
}

namespace {

using Subst = std::unordered_map<int, Term>;

Term walk(Term t, const Subst& s) {
  while (t.is_var()) {
    auto it = s.find(t.var_id());
    if (it == s.end()) break;
    t = it->second;
  }
  return t;
}

Term substitute(const Term& t, const Subst& s) {
  Term w = walk(t, s);
  if (!w.is_compound()) return w;
  std::vector<Term> args;
  args.reserve(w.arity());
  for (const auto& a : w.args()) args.push_back(substitute(a, s));
  return Term::compound(w.name(), std::move(args));
}

bool unify(const Term& a, const Term& b, Subst& s) {
  Term x = walk(a, s);
  Term y = walk(b, s);
  if (x.is_var() && y.is_var() && x.var_id() == y.var_id()) return true;
  if (x.is_var()) {
    s[x.var_id()] = y;
    return true;
  }
  if (y.is_var()) {
    s[y.var_id()] = x;
    return true;
  }
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Term::Kind::Int:
      return x.int_value() == y.int_value();
    case Term::Kind::Atom:
      return x.name() == y.name();
    default:
      break;
  }
  if (x.name() != y.name() || x.arity() != y.arity()) return false;
  for (std::size_t i = 0; i < x.arity(); ++i) {
    if (!unify(x.arg(i), y.arg(i), s)) return false;
  }
  return true;
}

std::int64_t eval(const Term& t, const Subst& s) {
  Term w = walk(t, s);
  if (w.is_int()) return w.int_value();
  if (w.is_var()) throw InstantiationError("oracle: unbound arithmetic operand");
  auto overflow = [&]() -> std::int64_t {
    throw EvaluationError("oracle: integer overflow in " + print_term(w));
  };
  std::int64_t r = 0;
  if (w.is_compound() && w.arity() == 1 && w.name() == "-") {
    if (__builtin_sub_overflow(std::int64_t{0}, eval(w.arg(0), s), &r)) {
      return overflow();
    }
    return r;
  }
  if (w.is_compound() && w.arity() == 1 && w.name() == "+") {
    return eval(w.arg(0), s);
  }
  if (w.is_compound() && w.arity() == 2) {
    const std::string& op = w.name();
    if (op == "+" || op == "-" || op == "*" || op == "//" || op == "mod") {
      std::int64_t a = eval(w.arg(0), s);
      std::int64_t b = eval(w.arg(1), s);
      bool bad = false;
      if (op == "+") {
        bad = __builtin_add_overflow(a, b, &r);
      } else if (op == "-") {
        bad = __builtin_sub_overflow(a, b, &r);
      } else if (op == "*") {
        bad = __builtin_mul_overflow(a, b, &r);
      } else if (b == 0) {
        throw EvaluationError("oracle: zero divisor in " + print_term(w));
      } else if (op == "//") {
        bad = a == INT64_MIN && b == -1;
        if (!bad) r = a / b;
      } else if (b == -1) {
        r = 0;
      } else {
        // Floored modulo, computed without relying on the sign of C++ %.
        std::int64_t q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
        r = a - q * b;
      }
      return bad ? overflow() : r;
    }
  }
  throw TypeError("oracle: not an integer expression: " + print_term(w));
}

enum class GoalKind { User, True, Fail, Unify, NotUnify, Is, Compare };

GoalKind kind_of(const Term& g) {
  PredId p = pred_of(g);
  if (p == PredId{"true", 0}) return GoalKind::True;
  if (p == PredId{"fail", 0}) return GoalKind::Fail;
  if (p.arity == 2) {
    if (p.name == "=") return GoalKind::Unify;
    if (p.name == "\\=") return GoalKind::NotUnify;
    if (p.name == "is") return GoalKind::Is;
    if (p.name == "<" || p.name == "=<" || p.name == ">" || p.name == ">=" ||
        p.name == "=:=") {
      return GoalKind::Compare;
    }
  }
  return GoalKind::User;
}

struct PreparedClause {
  Clause source;
  Term head;
  std::vector<Term> body;
};

[[noreturn]] void not_restricted(const Clause& c, const std::string& why) {
  throw OracleError("clause is not range-restricted (" + why +
                    "): " + print_clause(c));
}

void expand_goal(const Term& g, const Clause& c, std::vector<Term>& out) {
  if (g.is_var()) not_restricted(c, "variable goal");
  PredId p = pred_of(g);
  if (p == PredId{",", 2}) {
    expand_goal(g.arg(0), c, out);
    expand_goal(g.arg(1), c, out);
  } else if (p == PredId{"call", 1}) {
    expand_goal(g.arg(0), c, out);
  } else if (p == PredId{"slg", 1} || p == PredId{"slgcall", 1} ||
             p == PredId{"answer", 2}) {
    throw OracleError("tabling primitive " + p.str() +
                      " in oracle input: " + print_clause(c));
  } else {
    out.push_back(g);
  }
}

bool all_bound(const Term& t, const std::set<int>& bound) {
  for (const auto& v : vars_of(t)) {
    if (!bound.contains(v.var_id())) return false;
  }
  return true;
}

void bind_all(const Term& t, std::set<int>& bound) {
  for (const auto& v : vars_of(t)) bound.insert(v.var_id());
}

PreparedClause prepare(const Clause& c) {
  PreparedClause out{c, c.head, {}};
  for (const auto& g : c.body) expand_goal(g, c, out.body);
  std::set<int> bound;
  for (const auto& g : out.body) {
    switch (kind_of(g)) {
      case GoalKind::User:
        bind_all(g, bound);
        break;
      case GoalKind::True:
      case GoalKind::Fail:
        break;
      case GoalKind::Unify:
        if (!all_bound(g.arg(0), bound) && !all_bound(g.arg(1), bound)) {
          not_restricted(c, "neither side of " + print_term(g) + " is bound");
        }
        bind_all(g, bound);
        break;
      case GoalKind::Is:
        if (!all_bound(g.arg(1), bound)) {
          not_restricted(c, "unbound expression in " + print_term(g));
        }
        bind_all(g.arg(0), bound);
        break;
      case GoalKind::NotUnify:
      case GoalKind::Compare:
        if (!all_bound(g, bound)) {
          not_restricted(c, "unbound variable in test " + print_term(g));
        }
        break;
    }
  }
  if (!all_bound(c.head, bound)) not_restricted(c, "head variable not bound");
  return out;
}

// One round of the immediate-consequence operator over a fixed store.
class Round {
 public:
  Round(const GroundFactStore& in, GroundFactStore& out) : in_(in), out_(out) {
    for (const auto& p : in.predicates()) {
      if (p.arity == 0) continue;
      auto& idx = by_first_[p];
      for (const auto& f : in.facts(p)) idx[f.arg(0)].push_back(f);
    }
  }

  void run(const PreparedClause& c) {
    Subst s;
    solve(c, 0, s);
  }

 private:
  void solve(const PreparedClause& c, std::size_t i, Subst& s) {
    if (i == c.body.size()) {
      Term fact = substitute(c.head, s);
      if (!fact.is_ground()) {
        throw InternalError("oracle derived a non-ground fact " +
                            print_term(fact));
      }
      out_.insert(fact);
      return;
    }
    const Term& g = c.body[i];
    switch (kind_of(g)) {
      case GoalKind::True:
        solve(c, i + 1, s);
        return;
      case GoalKind::Fail:
        return;
      case GoalKind::Unify: {
        Subst t = s;
        if (unify(g.arg(0), g.arg(1), t)) solve(c, i + 1, t);
        return;
      }
      case GoalKind::NotUnify: {
        Subst t = s;
        if (!unify(g.arg(0), g.arg(1), t)) solve(c, i + 1, s);
        return;
      }
      case GoalKind::Is: {
        Subst t = s;
        if (unify(g.arg(0), Term::integer(eval(g.arg(1), s)), t)) {
          solve(c, i + 1, t);
        }
        return;
      }
      case GoalKind::Compare: {
        std::int64_t a = eval(g.arg(0), s);
        std::int64_t b = eval(g.arg(1), s);
        const std::string& op = g.name();
        bool ok = op == "<"    ? a < b
                  : op == "=<" ? a <= b
                  : op == ">"  ? a > b
                  : op == ">=" ? a >= b
                               : a == b;
        if (ok) solve(c, i + 1, s);
        return;
      }
      case GoalKind::User:
        break;
    }
    Term pattern = substitute(g, s);
    auto try_fact = [&](const Term& f) {
      Subst t = s;
      if (unify(pattern, f, t)) solve(c, i + 1, t);
    };
    PredId p = pred_of(pattern);
    if (p.arity > 0 && pattern.arg(0).is_ground()) {
      auto pi = by_first_.find(p);
      if (pi == by_first_.end()) return;
      auto fi = pi->second.find(pattern.arg(0));
      if (fi == pi->second.end()) return;
      for (const auto& f : fi->second) try_fact(f);
    } else {
      for (const auto& f : in_.facts(p)) try_fact(f);
    }
  }

  const GroundFactStore& in_;
  GroundFactStore& out_;
  std::map<PredId, std::unordered_map<Term, std::vector<Term>>> by_first_;
};

}  // namespace

std::vector<Term> GroundFactStore::matching(const Term& pattern) const {
  std::vector<Term> out;
  for (const auto& f : facts(pred_of(pattern))) {
    Subst s;
    if (unify(pattern, f, s)) out.push_back(f);
  }
  return out;
}

GroundFactStore bottom_up_eval(const Program& p, const OracleOptions& options) {
  std::vector<PreparedClause> clauses;
  clauses.reserve(p.clauses.size());
  for (const auto& c : p.clauses) clauses.push_back(prepare(c));

  GroundFactStore current;
  for (std::size_t round = 1;; ++round) {
    if (round > options.max_iterations) {
      throw ResourceError("oracle iteration cap of " +
                          std::to_string(options.max_iterations) +
                          " rounds exceeded");
    }
    GroundFactStore next = current;
    Round r(current, next);
    for (const auto& c : clauses) r.run(c);
    if (options.on_round) options.on_round(next);
    // Rounds only add facts, so equal sizes mean a fixpoint.
    if (next.size() == current.size()) return next;
    current = std::move(next);
  }
}

AnswerComparison compare_answer_sets(const std::vector<Term>& answers,
                                     const GroundFactStore& facts,
                                     const Term& call) {
  std::set<Term> expected;
  for (const auto& f : facts.matching(call)) {
    expected.insert(canonical_variant(f));
  }
  std::set<Term> got;
  for (const auto& a : answers) got.insert(canonical_variant(a));
  AnswerComparison out;
  std::set_difference(expected.begin(), expected.end(), got.begin(), got.end(),
                      std::back_inserter(out.missing));
  std::set_difference(got.begin(), got.end(), expected.begin(), expected.end(),
                      std::back_inserter(out.extra));
  out.equal = out.missing.empty() && out.extra.empty();
  return out;
}

}  // namespace ccall
