#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ccall/store.hpp"
#include "ccall/tabling.hpp"
#include "ccall/term.hpp"
#include "ccall/translate.hpp"

namespace ccall {

struct EngineOptions {
  // Selects the continuation arity accepted by slgcall/1 (4 or 3) and how
  // slg/1 treats a call whose table is still being evaluated: an internal
  // error in general mode, a read of the answers found so far in legacy mode
  // (which is what loses answers under the classic translation).
  TranslationMode mode = TranslationMode::General;
  // Goals dispatched per query before a ResourceError.
  std::uint64_t max_steps = 10'000'000;
};

/// SLD interpreter with the continuation-call tabling primitives.
///
/// The program is expected to be a translated one: tabled predicates are
/// recognised by their generator-entry predicate `slg_P/2`. Goals live in an
/// explicit frame list and alternatives on an explicit choice-point stack, so
/// neither Prolog recursion nor nested generators use the host stack.
///
/// Tabling follows local scheduling: answer/2 records and fails, and slg/1
/// returns answers only once the generator's dependency group is complete.
/// Tables persist across queries on the same engine.
class Engine {
 public:
  explicit Engine(const Program& program, EngineOptions options = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Lazy solution sequence for one goal. Only one query may be open per
  /// engine. Dropping an unfinished query abandons incomplete tables.
  class Query {
   public:
    Query(Query&& o) noexcept;
    Query& operator=(Query&&) = delete;
    ~Query();

    /// The goal instantiated by the next solution; nullopt when exhausted.
    /// Errors abandon the query and propagate.
    std::optional<Term> next();

   private:
    friend class Engine;
    explicit Query(Engine* e) : engine_(e) {}
    Engine* engine_;
    bool started_ = false;
    bool done_ = false;
  };

  Query query(const Term& goal);
  /// Runs a query to exhaustion.
  std::vector<Term> solve_all(const Term& goal);

  const Counters& counters() const { return counters_; }
  const TableSpace& tables() const { return tables_; }
  const EngineOptions& options() const { return options_; }

  /// Generator whose call is a variant of `call`, if any.
  std::optional<GeneratorId> find_table(const Term& call);
  Term table_call(GeneratorId id) const;
  std::vector<Term> table_answers(GeneratorId id) const;
  /// Stored continuations of `id`, as terms (empty once complete).
  std::vector<Term> table_continuations(GeneratorId id) const;

 private:
  struct CompiledClause {
    FrozenTerm code;  // '$clause'(Head, G1, ..., Gn)
    // Per head argument: Atom/Int cell, Fun cell for compounds, or a Var
    // cell when any argument can match.
    std::vector<Cell> keys;
  };
  struct Predicate {
    std::vector<CompiledClause> clauses;
    bool slg_entry = false;
  };
  struct Frame {
    Cell goal;
    std::int32_t next;
  };
  struct ChoicePoint {
    enum class Kind : std::uint8_t { Clauses, Generator, Answers };
    Kind kind;
    Store::Mark mark;
    std::size_t frames;
    Cell goal;  // Clauses: the call; Generator/Answers: term unified with answers
    Cell cont;  // Answers with resume: continuation run after each answer
    std::int32_t next;
    std::uint32_t pred = 0;
    std::size_t alt = 0;    // Clauses: next clause; Answers: next answer
    std::size_t limit = 0;  // Answers: one past the last answer delivered
    GeneratorId gen = 0;
    bool from_slg = false;
    bool resume = false;
  };
  enum class Builtin : std::uint8_t {
    None, True, Fail, Unify, NotUnify, Is, Lt, Le, Gt, Ge, ArithEq,
    Call, Conj, Slg, SlgCall, Answer,
  };

  static constexpr std::int32_t kDone = -1;

  void add_clause(const Clause& c);
  bool matches(const CompiledClause& c, Cell goal) const;
  std::optional<std::size_t> next_clause(const Predicate& p, Cell goal,
                                         std::size_t from) const;
  std::int32_t push_frame(Cell goal, std::int32_t next);
  ChoicePoint& push_cp(ChoicePoint::Kind kind);
  void restore(const ChoicePoint& cp);

  bool start(const Term& goal);
  bool run();
  bool step();
  bool backtrack();
  // Drops all execution state and abandons incomplete tables.
  void close_query();

  bool call_predicate(Cell goal, std::int32_t next);
  bool resolve(std::uint32_t pred, std::size_t clause, Cell goal,
               std::int32_t next);
  bool call_builtin(Builtin b, Cell goal, std::int32_t next);
  std::int64_t eval(Cell c);
  bool compare(Builtin b, Cell goal);

  bool do_slg(Cell goal, std::int32_t next);
  bool do_slgcall(Cell goal, std::int32_t next);
  bool do_answer(Cell goal);
  void capture(GeneratorId target, Cell cont);
  bool launch_generator(GeneratorId id, Cell call, std::int32_t next,
                        bool from_slg);
  // Functor of the slg_ entry predicate for a tabled call; throws when the
  // call's predicate is not tabled.
  FunctorId entry_functor(Cell call);
  void tick();
  bool retry_generator(ChoicePoint& cp);
  bool retry_answers(ChoicePoint& cp);
  void to_answers(ChoicePoint& cp, std::size_t limit);

  std::string describe(Cell c) const { return store_.describe(c); }

  EngineOptions options_;
  SymbolTable symbols_;
  Store store_;
  TableSpace tables_;
  Counters counters_;

  std::vector<Predicate> predicates_;
  std::unordered_map<FunctorId, std::uint32_t> predicate_index_;
  // Tabled call functor -> functor of its slg_ entry predicate.
  std::unordered_map<FunctorId, FunctorId> entry_cache_;
  std::vector<Builtin> builtins_;  // by FunctorId, for ids known at load

  std::vector<Frame> frames_;
  std::vector<ChoicePoint> cps_;
  std::int32_t cur_ = kDone;
  Cell query_goal_;
  bool active_ = false;
  std::uint64_t step_limit_ = 0;

  FunctorId plus_f_, minus_f_, times_f_, intdiv_f_, mod_f_,
      neg_f_, pos_f_;
  Cell fail_atom_;
};

}  // namespace ccall
