#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ccall/term.hpp"

namespace ccall {

using SymbolId = std::uint32_t;
using FunctorId = std::uint32_t;
using Address = std::uint32_t;

/// Interned atom names and name/arity functors.
class SymbolTable {
 public:
  SymbolId intern(std::string_view name);
  const std::string& name(SymbolId id) const { return names_[id]; }

  FunctorId functor(SymbolId name, std::uint32_t arity);
  FunctorId functor(std::string_view name, std::uint32_t arity) {
    return functor(intern(name), arity);
  }
  SymbolId functor_name(FunctorId f) const { return functors_[f].name; }
  std::uint32_t functor_arity(FunctorId f) const { return functors_[f].arity; }
  std::size_t functor_count() const { return functors_.size(); }

 private:
  struct FunctorKey {
    SymbolId name;
    std::uint32_t arity;
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, SymbolId> ids_;
  std::vector<FunctorKey> functors_;
  std::unordered_map<std::uint64_t, FunctorId> functor_ids_;
};

enum class Tag : std::uint8_t {
  Ref,  // variable; unbound when it refers to itself
  Atom,
  Int,
  Str,  // pointer to a Fun cell followed by the arguments
  Fun,
  Var,  // numbered variable, only inside FrozenTerm
};

struct Cell {
  Tag tag = Tag::Atom;
  std::int64_t value = 0;

  static Cell ref(Address a) { return {Tag::Ref, a}; }
  static Cell atom(SymbolId s) { return {Tag::Atom, s}; }
  static Cell integer(std::int64_t v) { return {Tag::Int, v}; }
  static Cell str(Address a) { return {Tag::Str, a}; }
  static Cell fun(FunctorId f) { return {Tag::Fun, f}; }
  static Cell var(std::int64_t k) { return {Tag::Var, k}; }

  Address addr() const { return static_cast<Address>(value); }

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Self-contained copy of a term outside the heap.
///
/// Cell 0 is the root; Str cells hold offsets into `cells`; variables are
/// Var cells numbered 0.. in left-to-right order of first occurrence. Freezing
/// two variant terms therefore yields identical cell vectors, which makes a
/// FrozenTerm directly usable as a variant key.
struct FrozenTerm {
  std::vector<Cell> cells;
  std::uint32_t var_count = 0;

  friend bool operator==(const FrozenTerm&, const FrozenTerm&) = default;
};

struct FrozenTermHash {
  std::size_t operator()(const FrozenTerm& t) const noexcept;
};

/// Heap of cells with a trail of bound variables.
///
/// Bindings are always trailed; undo_to(mark) restores exactly the bindings
/// that existed when the mark was taken. Unification has no occurs check.
class Store {
 public:
  explicit Store(SymbolTable& symbols) : symbols_(symbols) {}

  SymbolTable& symbols() { return symbols_; }
  const SymbolTable& symbols() const { return symbols_; }

  Cell new_var();
  Cell new_atom(std::string_view name) {
    return Cell::atom(symbols_.intern(name));
  }
  /// Allocates a compound with the given arguments.
  Cell new_struct(FunctorId f, std::initializer_list<Cell> args);
  Cell new_struct(FunctorId f, const std::vector<Cell>& args);

  Cell deref(Cell c) const;
  const Cell& at(Address a) const { return heap_[a]; }
  /// For a dereferenced Str cell: functor and arguments.
  FunctorId functor_of(Cell str) const { return heap_[str.addr()].value; }
  Cell arg(Cell str, std::size_t i) const { return heap_[str.addr() + 1 + i]; }

  /// Most general unifier. On failure every binding made by this call is
  /// undone and false is returned.
  bool unify(Cell a, Cell b);

  std::size_t heap_size() const { return heap_.size(); }
  std::size_t trail_size() const { return trail_.size(); }

  struct Mark {
    std::size_t heap;
    std::size_t trail;
  };
  Mark mark() const { return {heap_.size(), trail_.size()}; }
  /// Undoes bindings recorded after `m` and discards heap cells above it.
  void undo_to(Mark m);
  /// Undoes bindings only (heap cells are kept).
  void undo_trail_to(std::size_t trail_mark);

  // Conversion between heap cells, syntax terms and frozen terms.
  Cell from_term(const Term& t, std::unordered_map<int, Cell>& vars);
  Cell from_term(const Term& t) {
    std::unordered_map<int, Cell> vars;
    return from_term(t, vars);
  }
  /// Unbound variables become Term variables whose id is their heap address.
  Term to_term(Cell c) const;
  FrozenTerm freeze(Cell c) const;
  /// Copies a frozen term onto the heap with fresh variables.
  Cell thaw(const FrozenTerm& t);
  /// Number of term nodes (variables, constants, compounds) under `c`.
  std::size_t node_count(Cell c) const;

  bool is_callable(Cell c) const;
  std::string describe(Cell c) const;

 private:
  void bind(Address var, Cell value);

  SymbolTable& symbols_;
  std::vector<Cell> heap_;
  std::vector<Address> trail_;
};

/// Frozen term conversions that do not need a heap.
FrozenTerm freeze_term(const Term& t, SymbolTable& symbols);
Term frozen_to_term(const FrozenTerm& t, const SymbolTable& symbols);

}  // namespace ccall
