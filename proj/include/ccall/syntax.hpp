#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ccall/term.hpp"

namespace ccall {

struct Diagnostic {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;

  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           message;
  }
};

/// Parses clauses and `:- table P/N.` / `:- bridge P/N.` directives.
///
/// Variables are renamed apart per clause: ids restart at 0 in every clause,
/// in order of first occurrence. Throws SyntaxError (with position) on
/// malformed input and LoadError when a predicate is declared both table and
/// bridge. Directives naming predicates without clauses produce warnings.
Program parse_program(std::string_view text,
                      std::vector<Diagnostic>* warnings = nullptr);

/// Parses a single term (e.g. a query). A trailing '.' is optional.
Term parse_term(std::string_view text);

struct PrintStyle {
  // Separator between compound arguments: ", " for listings, "," for answers.
  bool compact = false;
};

std::string print_term(const Term& t, PrintStyle style = {});
std::string print_clause(const Clause& c);
/// Directives first (table, then bridge, each sorted), then clauses in order.
/// An empty program prints as the empty string.
std::string print_program(const Program& p);

/// Renumbers variables left to right from 0 (printable names `_0`, `_1`...).
/// Two terms are variants iff their canonical forms compare equal.
Term canonical_variant(const Term& t);
Clause canonical_clause(const Clause& c);
bool is_variant(const Term& a, const Term& b);

/// Clause-by-clause equality up to per-clause variable renaming, plus equal
/// directive sets.
bool structurally_equal(const Program& a, const Program& b);

}  // namespace ccall
