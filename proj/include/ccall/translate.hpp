#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ccall/syntax.hpp"
#include "ccall/term.hpp"

namespace ccall {

enum class TranslationMode {
  // Bridge-aware translation: bridge clauses are kept and duplicated as
  // P_bridge clauses that thread a continuation argument.
  General,
  // Classic continuation-call translation: bridge sets are ignored and
  // continuation terms have no previous-continuation argument.
  Legacy,
};

const char* to_string(TranslationMode mode);

/// Result of splitting a body at its leftmost tabled or bridge goal.
struct BodySplit {
  std::vector<Term> prefix;
  std::optional<Term> pivot;
  std::vector<Term> suffix;
};

/// Splits `body` at the leftmost goal whose predicate is in `marked`. Without
/// a pivot the whole body is the prefix.
BodySplit split_following(std::span<const Term> body,
                          const std::set<PredId>& marked);

/// Variables that occur in `before` and in `after` but not in `pivot`,
/// ordered by first occurrence in `before`.
std::vector<Term> get_lbinds(std::span<const Term> before, const Term& pivot,
                             std::span<const Term> after);

/// Translates clause bodies into a head clause plus continuation clauses.
///
/// One instance should be used for a whole program so that continuation
/// names stay unique: names are `<base><k>` where base is the functor of the
/// rewritten head (`slg_t`, `p_bridge`) and k counts from 0 per base.
class BodyTranslator {
 public:
  BodyTranslator(TranslationMode mode, std::set<PredId> tabled,
                 std::set<PredId> bridges);

  /// `head` is the rewritten head, `slg_P(Head, Id)` or
  /// `P_bridge(Head, Id, Cont)`; `end` is `answer(Id, Head)` or
  /// `call(Cont)`. `prev_cont` is the previous-continuation argument stored
  /// in every continuation term (`[]` for tabled clauses, the Cont variable
  /// for bridge clauses); it must be absent in legacy mode.
  ///
  /// The first returned clause has `head` as its head; each later clause is a
  /// continuation and the last one ends with `end`.
  std::vector<Clause> trans_body(const Term& head, std::span<const Term> body,
                                 const Term& id,
                                 const std::optional<Term>& prev_cont,
                                 const Term& end);

  TranslationMode mode() const { return mode_; }
  bool is_marked(const PredId& p) const;

 private:
  std::string next_name(const std::string& base);

  TranslationMode mode_;
  std::set<PredId> tabled_;
  std::set<PredId> bridges_;
  std::set<PredId> marked_;
  std::map<std::string, int> counters_;
};

/// Name of the generator-entry predicate for tabled `name` (`slg_<name>`).
std::string slg_name(const std::string& name);
/// Name of the continuation-passing copy of bridge `name`.
std::string bridge_name(const std::string& name);

/// Source-to-source translation for continuation-call tabling.
///
/// Undeclared predicates pass through unchanged and in place. Each tabled or
/// (general mode) bridge predicate is replaced, at the position of its first
/// clause, by its translated group. The result carries no directives: it is
/// an ordinary program over the slg/1, slgcall/1 and answer/2 primitives.
///
/// Throws TranslationError for call/1 applied to a tabled goal and for
/// generated names that collide with program predicates.
Program translate(const Program& p, TranslationMode mode,
                  std::vector<Diagnostic>* warnings = nullptr);

}  // namespace ccall
