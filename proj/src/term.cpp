#include "ccall/term.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccall {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Term::Term() : Term(atom("[]")) {}

Term Term::var(int id, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var_id = id;
  n->name = std::move(name);
  n->hash = mix(1, static_cast<std::size_t>(id));
  return Term(std::move(n));
}

Term Term::atom(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->hash = mix(2, std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::integer(std::int64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Int;
  n->value = value;
  n->hash = mix(3, std::hash<std::int64_t>{}(value));
  return Term(std::move(n));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) {
    throw std::invalid_argument("compound term '" + functor +
                                "' needs at least one argument");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compound;
  std::size_t h = mix(4, std::hash<std::string>{}(functor));
  h = mix(h, args.size());
  for (const auto& a : args) h = mix(h, a.hash());
  n->hash = h;
  n->name = std::move(functor);
  n->args = std::move(args);
  return Term(std::move(n));
}

bool Term::is_ground() const {
  switch (kind()) {
    case Kind::Var:
      return false;
    case Kind::Compound:
      return std::all_of(node_->args.begin(), node_->args.end(),
                         [](const Term& a) { return a.is_ground(); });
    default:
      return true;
  }
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.hash() != b.hash()) return false;
  switch (a.kind()) {
    case Term::Kind::Var:
      return a.var_id() == b.var_id();
    case Term::Kind::Atom:
      return a.name() == b.name();
    case Term::Kind::Int:
      return a.int_value() == b.int_value();
    case Term::Kind::Compound:
      return a.name() == b.name() && a.node_->args == b.node_->args;
  }
  return false;
}

// Standard order: Var < Int < Atom < Compound; compounds by arity, name, args.
std::strong_ordering operator<=>(const Term& a, const Term& b) {
  auto rank = [](Term::Kind k) {
    switch (k) {
      case Term::Kind::Var: return 0;
      case Term::Kind::Int: return 1;
      case Term::Kind::Atom: return 2;
      case Term::Kind::Compound: return 3;
    }
    return 4;
  };
  if (a.kind() != b.kind()) return rank(a.kind()) <=> rank(b.kind());
  switch (a.kind()) {
    case Term::Kind::Var:
      return a.var_id() <=> b.var_id();
    case Term::Kind::Int:
      return a.int_value() <=> b.int_value();
    case Term::Kind::Atom:
      return a.name().compare(b.name()) <=> 0;
    case Term::Kind::Compound: {
      if (auto c = a.arity() <=> b.arity(); c != 0) return c;
      if (auto c = a.name().compare(b.name()) <=> 0; c != 0) return c;
      for (std::size_t i = 0; i < a.arity(); ++i) {
        if (auto c = a.arg(i) <=> b.arg(i); c != 0) return c;
      }
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

PredId pred_of(const Term& t) {
  if (t.is_atom()) return {t.name(), 0};
  if (t.is_compound()) return {t.name(), t.arity()};
  throw std::invalid_argument("not a callable term");
}

Term make_list(std::vector<Term> items, Term tail) {
  Term result = std::move(tail);
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    result = Term::compound(".", {*it, result});
  }
  return result;
}

bool is_nil(const Term& t) { return t.is_atom("[]"); }

bool is_cons(const Term& t) {
  return t.is_compound() && t.arity() == 2 && t.name() == ".";
}

void collect_vars(const Term& t, std::vector<Term>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      if (std::none_of(out.begin(), out.end(), [&](const Term& v) {
            return v.var_id() == t.var_id();
          })) {
        out.push_back(t);
      }
      break;
    case Term::Kind::Compound:
      for (const auto& a : t.args()) collect_vars(a, out);
      break;
    default:
      break;
  }
}

std::vector<Term> vars_of(const Term& t) {
  std::vector<Term> out;
  collect_vars(t, out);
  return out;
}

int max_var_id(const Clause& c) {
  std::vector<Term> vars;
  collect_vars(c.head, vars);
  for (const auto& g : c.body) collect_vars(g, vars);
  int best = -1;
  for (const auto& v : vars) best = std::max(best, v.var_id());
  return best;
}

std::vector<Term> flatten_conjunction(const Term& t) {
  std::vector<Term> goals;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term g = stack.back();
    stack.pop_back();
    if (g.is_compound() && g.arity() == 2 && g.name() == ",") {
      stack.push_back(g.arg(1));
      stack.push_back(g.arg(0));
    } else {
      goals.push_back(g);
    }
  }
  return goals;
}

Term make_conjunction(std::span<const Term> goals) {
  if (goals.empty()) return Term::atom("true");
  Term result = goals.back();
  for (std::size_t i = goals.size() - 1; i-- > 0;) {
    result = Term::compound(",", {goals[i], result});
  }
  return result;
}

}  // namespace ccall
