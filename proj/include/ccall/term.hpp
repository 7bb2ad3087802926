#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ccall {

/// Immutable logic term: variable, atom, integer or compound.
///
/// Terms share structure through reference counting, so copies are cheap.
/// Equality is structural; two variables are equal iff their ids are equal
/// (the printable name is cosmetic).
class Term {
 public:
  enum class Kind : std::uint8_t { Var, Atom, Int, Compound };

  /// Default-constructs the atom `[]`.
  Term();

  static Term var(int id, std::string name = {});
  static Term atom(std::string name);
  static Term integer(std::int64_t value);
  /// Throws std::invalid_argument when `args` is empty; zero-arity symbols
  /// are atoms.
  static Term compound(std::string functor, std::vector<Term> args);

  Kind kind() const { return node_->kind; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_compound() const { return kind() == Kind::Compound; }
  bool is_callable() const { return is_atom() || is_compound(); }
  bool is_atom(std::string_view name) const {
    return is_atom() && node_->name == name;
  }

  int var_id() const { return node_->var_id; }
  /// Variable name, atom name, or compound functor.
  const std::string& name() const { return node_->name; }
  std::int64_t int_value() const { return node_->value; }
  std::size_t arity() const { return node_->args.size(); }
  std::span<const Term> args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args[i]; }

  bool is_ground() const;
  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind;
    int var_id = -1;
    std::int64_t value = 0;
    std::string name;
    std::vector<Term> args;
    std::size_t hash = 0;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Predicate indicator. Ordered by name, then arity.
struct PredId {
  std::string name;
  std::size_t arity = 0;

  std::string str() const { return name + "/" + std::to_string(arity); }

  friend auto operator<=>(const PredId&, const PredId&) = default;
  friend bool operator==(const PredId&, const PredId&) = default;
};

/// Predicate indicator of a callable term.
PredId pred_of(const Term& t);

struct Clause {
  Term head;
  std::vector<Term> body;  // empty for facts

  PredId pred() const { return pred_of(head); }
  bool is_fact() const { return body.empty(); }

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct Program {
  std::vector<Clause> clauses;  // source order
  std::set<PredId> tabled;
  std::set<PredId> bridges;

  friend bool operator==(const Program&, const Program&) = default;
};

// List helpers: lists are '.'/2 cells terminated by '[]'.
Term make_list(std::vector<Term> items, Term tail = Term());
bool is_nil(const Term& t);
bool is_cons(const Term& t);

/// Appends each distinct variable of `t` to `out`, left to right, skipping
/// ids already present in `out`.
void collect_vars(const Term& t, std::vector<Term>& out);
std::vector<Term> vars_of(const Term& t);
/// Largest variable id occurring in the clause, or -1.
int max_var_id(const Clause& c);

/// Flattens a ','/2 conjunction into a goal list.
std::vector<Term> flatten_conjunction(const Term& t);
Term make_conjunction(std::span<const Term> goals);

}  // namespace ccall

template <>
struct std::hash<ccall::Term> {
  std::size_t operator()(const ccall::Term& t) const noexcept {
    return t.hash();
  }
};
