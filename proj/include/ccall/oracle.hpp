#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "ccall/term.hpp"

namespace ccall {

/// Ground facts per predicate.
class GroundFactStore {
 public:
  /// False when the fact was already present.
  bool insert(const Term& fact);
  bool contains(const Term& fact) const;
  const std::set<Term>& facts(const PredId& p) const;
  std::size_t size() const { return size_; }
  std::set<PredId> predicates() const;

  /// Stored facts that are instances of `pattern`.
  std::vector<Term> matching(const Term& pattern) const;

  friend bool operator==(const GroundFactStore& a, const GroundFactStore& b) {
    return a.facts_ == b.facts_;
  }

 private:
  std::map<PredId, std::set<Term>> facts_;
  std::size_t size_ = 0;
};

struct OracleOptions {
  std::size_t max_iterations = 100'000;
  // Called with the store after every round.
  std::function<void(const GroundFactStore&)> on_round;
};

/// Least model of an untranslated program by naive bottom-up iteration.
///
/// Directives are ignored. Every clause must be range-restricted: each
/// variable has to be bound, left to right, by a program goal, by `X = T`
/// with one side already bound, or by `X is E` with `E` bound, before it is
/// used in a test or in the head. Throws OracleError naming the offending
/// clause otherwise, EvaluationError/TypeError for bad arithmetic, and
/// ResourceError when the iteration cap is hit.
GroundFactStore bottom_up_eval(const Program& p, const OracleOptions& options = {});

struct AnswerComparison {
  bool equal = true;
  std::vector<Term> missing;  // in the oracle, not among the answers
  std::vector<Term> extra;    // among the answers, not in the oracle
};

/// Compares `answers` (e.g. the solutions of a query) with the oracle facts
/// that are instances of `call`, as sets up to variable renaming. Both lists
/// in the result are sorted.
AnswerComparison compare_answer_sets(const std::vector<Term>& answers,
                                     const GroundFactStore& facts,
                                     const Term& call);

}  // namespace ccall
