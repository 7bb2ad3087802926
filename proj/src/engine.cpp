#include "ccall/engine.hpp"

#include <string>
#include <utility>

#include "ccall/error.hpp"
#include "ccall/translate.hpp"

namespace ccall {

Engine::Engine(const Program& program, EngineOptions options)
    : options_(options), store_(symbols_) {
  plus_f_ = symbols_.functor("+", 2);
  minus_f_ = symbols_.functor("-", 2);
  times_f_ = symbols_.functor("*", 2);
  intdiv_f_ = symbols_.functor("//", 2);
  mod_f_ = symbols_.functor("mod", 2);
  neg_f_ = symbols_.functor("-", 1);
  pos_f_ = symbols_.functor("+", 1);
  fail_atom_ = store_.new_atom("$fail");

  const std::pair<PredId, Builtin> table[] = {
      {{"true", 0}, Builtin::True},      {{"fail", 0}, Builtin::Fail},
      {{"$fail", 0}, Builtin::Fail},     {{"=", 2}, Builtin::Unify},
      {{"\\=", 2}, Builtin::NotUnify},   {{"is", 2}, Builtin::Is},
      {{"<", 2}, Builtin::Lt},           {{"=<", 2}, Builtin::Le},
      {{">", 2}, Builtin::Gt},           {{">=", 2}, Builtin::Ge},
      {{"=:=", 2}, Builtin::ArithEq},    {{"call", 1}, Builtin::Call},
      {{",", 2}, Builtin::Conj},         {{"slg", 1}, Builtin::Slg},
      {{"slgcall", 1}, Builtin::SlgCall}, {{"answer", 2}, Builtin::Answer},
  };
  for (const auto& [pred, b] : table) {
    FunctorId f =
        symbols_.functor(pred.name, static_cast<std::uint32_t>(pred.arity));
    if (builtins_.size() <= f) builtins_.resize(f + 1, Builtin::None);
    builtins_[f] = b;
  }
  for (const auto& c : program.clauses) add_clause(c);

  // A predicate the program calls but never defines (e.g. an empty fact
  // base) simply has no clauses; only names the program never mentions are
  // unknown procedures.
  for (const auto& c : program.clauses) {
    for (const auto& g : c.body) {
      for (const auto& sub : flatten_conjunction(g)) {
        if (!sub.is_callable()) continue;
        FunctorId f = symbols_.functor(sub.name(),
                                       static_cast<std::uint32_t>(sub.arity()));
        if (f < builtins_.size() && builtins_[f] != Builtin::None) continue;
        auto [it, inserted] = predicate_index_.try_emplace(
            f, static_cast<std::uint32_t>(predicates_.size()));
        if (inserted) predicates_.emplace_back();
      }
    }
  }
}

void Engine::add_clause(const Clause& c) {
  if (!c.head.is_callable()) {
    throw LoadError("clause head is not callable: " + print_term(c.head));
  }
  PredId pred = c.pred();
  FunctorId f =
      symbols_.functor(pred.name, static_cast<std::uint32_t>(pred.arity));
  if (f < builtins_.size() && builtins_[f] != Builtin::None) {
    throw LoadError("cannot redefine built-in " + pred.str());
  }
  auto [it, inserted] = predicate_index_.try_emplace(
      f, static_cast<std::uint32_t>(predicates_.size()));
  if (inserted) predicates_.emplace_back();
  Predicate& p = predicates_[it->second];

  std::vector<Term> parts{c.head};
  parts.insert(parts.end(), c.body.begin(), c.body.end());
  CompiledClause cc;
  cc.code = freeze_term(Term::compound("$clause", std::move(parts)), symbols_);
  for (std::size_t i = 0; i < pred.arity; ++i) {
    const Term& a = c.head.arg(i);
    switch (a.kind()) {
      case Term::Kind::Var:
        cc.keys.push_back(Cell::var(0));
        break;
      case Term::Kind::Atom:
        cc.keys.push_back(Cell::atom(symbols_.intern(a.name())));
        break;
      case Term::Kind::Int:
        cc.keys.push_back(Cell::integer(a.int_value()));
        break;
      case Term::Kind::Compound:
        cc.keys.push_back(Cell::fun(symbols_.functor(
            a.name(), static_cast<std::uint32_t>(a.arity()))));
        break;
    }
  }
  p.clauses.push_back(std::move(cc));
}

bool Engine::matches(const CompiledClause& c, Cell goal) const {
  if (goal.tag != Tag::Str) return true;
  for (std::size_t i = 0; i < c.keys.size(); ++i) {
    const Cell& key = c.keys[i];
    if (key.tag == Tag::Var) continue;
    Cell a = store_.deref(store_.arg(goal, i));
    if (a.tag == Tag::Ref) continue;
    if (key.tag == Tag::Fun) {
      if (a.tag != Tag::Str || store_.functor_of(a) != key.value) return false;
    } else if (a != key) {
      return false;
    }
  }
  return true;
}

std::optional<std::size_t> Engine::next_clause(const Predicate& p, Cell goal,
                                               std::size_t from) const {
  for (std::size_t i = from; i < p.clauses.size(); ++i) {
    if (matches(p.clauses[i], goal)) return i;
  }
  return std::nullopt;
}

std::int32_t Engine::push_frame(Cell goal, std::int32_t next) {
  frames_.push_back({goal, next});
  return static_cast<std::int32_t>(frames_.size() - 1);
}

Engine::ChoicePoint& Engine::push_cp(ChoicePoint::Kind kind) {
  ChoicePoint cp{};
  cp.kind = kind;
  cp.mark = store_.mark();
  cp.frames = frames_.size();
  cps_.push_back(cp);
  return cps_.back();
}

void Engine::restore(const ChoicePoint& cp) {
  store_.undo_to(cp.mark);
  frames_.resize(cp.frames);
}

void Engine::tick() {
  if (++counters_.steps > step_limit_) {
    throw ResourceError("step budget of " + std::to_string(options_.max_steps) +
                        " exceeded");
  }
}

// ---------------------------------------------------------------------------
// Queries

Engine::Query::Query(Query&& o) noexcept
    : engine_(std::exchange(o.engine_, nullptr)),
      started_(o.started_),
      done_(o.done_) {}

Engine::Query::~Query() {
  if (engine_ != nullptr && !done_) engine_->close_query();
}

std::optional<Term> Engine::Query::next() {
  if (engine_ == nullptr || done_) return std::nullopt;
  try {
    bool ok = started_ ? engine_->backtrack() && engine_->run() : engine_->run();
    started_ = true;
    if (!ok) {
      done_ = true;
      engine_->close_query();
      return std::nullopt;
    }
    return engine_->store_.to_term(engine_->query_goal_);
  } catch (...) {
    done_ = true;
    engine_->close_query();
    throw;
  }
}

Engine::Query Engine::query(const Term& goal) {
  if (active_) throw Error("another query is still open on this engine");
  active_ = true;
  store_.undo_to({0, 0});
  frames_.clear();
  cps_.clear();
  step_limit_ = counters_.steps + options_.max_steps;
  query_goal_ = store_.from_term(goal);
  cur_ = push_frame(query_goal_, kDone);
  return Query(this);
}

std::vector<Term> Engine::solve_all(const Term& goal) {
  std::vector<Term> out;
  Query q = query(goal);
  while (auto t = q.next()) out.push_back(std::move(*t));
  return out;
}

void Engine::close_query() {
  if (tables_.completion_depth() > 0) tables_.abandon_incomplete();
  cps_.clear();
  frames_.clear();
  store_.undo_to({0, 0});
  cur_ = kDone;
  active_ = false;
}

std::optional<GeneratorId> Engine::find_table(const Term& call) {
  return tables_.find(freeze_term(call, symbols_));
}

Term Engine::table_call(GeneratorId id) const {
  return frozen_to_term(tables_.entry(id).call, symbols_);
}

std::vector<Term> Engine::table_answers(GeneratorId id) const {
  std::vector<Term> out;
  for (const auto& a : tables_.entry(id).answers) {
    out.push_back(frozen_to_term(a, symbols_));
  }
  return out;
}

std::vector<Term> Engine::table_continuations(GeneratorId id) const {
  std::vector<Term> out;
  for (const auto& c : tables_.entry(id).continuations) {
    out.push_back(frozen_to_term(c.term, symbols_));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resolution

bool Engine::run() {
  for (;;) {
    if (cur_ == kDone) return true;
    if (!step() && !backtrack()) return false;
  }
}

bool Engine::step() {
  const Frame f = frames_[cur_];
  tick();
  Cell goal = store_.deref(f.goal);
  FunctorId fid;
  switch (goal.tag) {
    case Tag::Ref:
      throw InstantiationError("goal is not sufficiently instantiated");
    case Tag::Atom:
      fid = symbols_.functor(static_cast<SymbolId>(goal.value), 0);
      break;
    case Tag::Str:
      fid = store_.functor_of(goal);
      break;
    default:
      throw TypeError("callable expected, found " + describe(goal));
  }
  if (fid < builtins_.size() && builtins_[fid] != Builtin::None) {
    return call_builtin(builtins_[fid], goal, f.next);
  }
  return call_predicate(goal, f.next);
}

bool Engine::call_predicate(Cell goal, std::int32_t next) {
  FunctorId fid = goal.tag == Tag::Atom
                      ? symbols_.functor(static_cast<SymbolId>(goal.value), 0)
                      : store_.functor_of(goal);
  auto it = predicate_index_.find(fid);
  if (it == predicate_index_.end()) {
    throw ExistenceError("unknown procedure " +
                         symbols_.name(symbols_.functor_name(fid)) + "/" +
                         std::to_string(symbols_.functor_arity(fid)));
  }
  const std::uint32_t pred = it->second;
  const Predicate& p = predicates_[pred];
  auto first = next_clause(p, goal, 0);
  if (!first) return false;
  if (auto second = next_clause(p, goal, *first + 1)) {
    ChoicePoint& cp = push_cp(ChoicePoint::Kind::Clauses);
    cp.goal = goal;
    cp.next = next;
    cp.pred = pred;
    cp.alt = *second;
  }
  return resolve(pred, *first, goal, next);
}

bool Engine::resolve(std::uint32_t pred, std::size_t clause, Cell goal,
                     std::int32_t next) {
  const Predicate& p = predicates_[pred];
  if (p.slg_entry) ++counters_.slg_clause_resolutions;
  Cell code = store_.thaw(p.clauses[clause].code);
  if (!store_.unify(store_.arg(code, 0), goal)) return false;
  std::uint32_t n = symbols_.functor_arity(store_.functor_of(code));
  std::int32_t k = next;
  for (std::uint32_t i = n; i-- > 1;) k = push_frame(store_.arg(code, i), k);
  cur_ = k;
  return true;
}

bool Engine::backtrack() {
  while (!cps_.empty()) {
    ChoicePoint& cp = cps_.back();
    restore(cp);
    switch (cp.kind) {
      case ChoicePoint::Kind::Clauses: {
        const std::uint32_t pred = cp.pred;
        const std::size_t clause = cp.alt;
        const Cell goal = cp.goal;
        const std::int32_t next = cp.next;
        if (auto after = next_clause(predicates_[pred], goal, clause + 1)) {
          cp.alt = *after;
        } else {
          cps_.pop_back();
        }
        tick();
        if (resolve(pred, clause, goal, next)) return true;
        break;
      }
      case ChoicePoint::Kind::Generator:
        if (retry_generator(cp)) return true;
        break;
      case ChoicePoint::Kind::Answers:
        if (retry_answers(cp)) return true;
        break;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Built-ins

bool Engine::call_builtin(Builtin b, Cell goal, std::int32_t next) {
  switch (b) {
    case Builtin::True:
      cur_ = next;
      return true;
    case Builtin::Fail:
    case Builtin::None:
      return false;
    case Builtin::Unify:
      if (!store_.unify(store_.arg(goal, 0), store_.arg(goal, 1))) return false;
      cur_ = next;
      return true;
    case Builtin::NotUnify: {
      std::size_t t = store_.trail_size();
      if (store_.unify(store_.arg(goal, 0), store_.arg(goal, 1))) {
        store_.undo_trail_to(t);
        return false;
      }
      cur_ = next;
      return true;
    }
    case Builtin::Is: {
      std::int64_t v = eval(store_.arg(goal, 1));
      if (!store_.unify(store_.arg(goal, 0), Cell::integer(v))) return false;
      cur_ = next;
      return true;
    }
    case Builtin::Lt:
    case Builtin::Le:
    case Builtin::Gt:
    case Builtin::Ge:
    case Builtin::ArithEq:
      if (!compare(b, goal)) return false;
      cur_ = next;
      return true;
    case Builtin::Call:
      cur_ = push_frame(store_.arg(goal, 0), next);
      return true;
    case Builtin::Conj:
      cur_ = push_frame(store_.arg(goal, 0),
                        push_frame(store_.arg(goal, 1), next));
      return true;
    case Builtin::Slg:
      return do_slg(goal, next);
    case Builtin::SlgCall:
      return do_slgcall(goal, next);
    case Builtin::Answer:
      return do_answer(goal);
  }
  return false;
}

std::int64_t Engine::eval(Cell c) {
  c = store_.deref(c);
  switch (c.tag) {
    case Tag::Int:
      return c.value;
    case Tag::Ref:
      throw InstantiationError("arithmetic on an unbound variable");
    case Tag::Str:
      break;
    default:
      throw TypeError("evaluable expected, found " + describe(c));
  }
  FunctorId f = store_.functor_of(c);
  if (f == neg_f_) {
    std::int64_t r;
    if (__builtin_sub_overflow(std::int64_t{0}, eval(store_.arg(c, 0)), &r)) {
      throw EvaluationError("integer overflow in " + describe(c));
    }
    return r;
  }
  if (f == pos_f_) return eval(store_.arg(c, 0));
  if (f != plus_f_ && f != minus_f_ && f != times_f_ && f != intdiv_f_ &&
      f != mod_f_) {
    throw TypeError("evaluable expected, found " +
                    symbols_.name(symbols_.functor_name(f)) + "/" +
                    std::to_string(symbols_.functor_arity(f)));
  }
  std::int64_t a = eval(store_.arg(c, 0));
  std::int64_t b = eval(store_.arg(c, 1));
  std::int64_t r = 0;
  bool overflow = false;
  if (f == plus_f_) {
    overflow = __builtin_add_overflow(a, b, &r);
  } else if (f == minus_f_) {
    overflow = __builtin_sub_overflow(a, b, &r);
  } else if (f == times_f_) {
    overflow = __builtin_mul_overflow(a, b, &r);
  } else {
    if (b == 0) throw EvaluationError("zero divisor in " + describe(c));
    if (a == INT64_MIN && b == -1) {
      overflow = f == intdiv_f_;
      r = 0;
    } else if (f == intdiv_f_) {
      r = a / b;  // truncates toward zero
    } else {
      r = a % b;  // result takes the sign of the divisor
      if (r != 0 && ((r < 0) != (b < 0))) r += b;
    }
  }
  if (overflow) throw EvaluationError("integer overflow in " + describe(c));
  return r;
}

bool Engine::compare(Builtin b, Cell goal) {
  std::int64_t x = eval(store_.arg(goal, 0));
  std::int64_t y = eval(store_.arg(goal, 1));
  switch (b) {
    case Builtin::Lt:
      return x < y;
    case Builtin::Le:
      return x <= y;
    case Builtin::Gt:
      return x > y;
    case Builtin::Ge:
      return x >= y;
    default:
      return x == y;
  }
}

// ---------------------------------------------------------------------------
// Tabling primitives

FunctorId Engine::entry_functor(Cell call) {
  FunctorId f = call.tag == Tag::Atom
                    ? symbols_.functor(static_cast<SymbolId>(call.value), 0)
                    : store_.functor_of(call);
  auto cached = entry_cache_.find(f);
  if (cached != entry_cache_.end()) return cached->second;
  const std::string& name = symbols_.name(symbols_.functor_name(f));
  FunctorId entry = symbols_.functor(slg_name(name), 2);
  auto it = predicate_index_.find(entry);
  if (it == predicate_index_.end()) {
    throw ExistenceError("not a tabled predicate: " + name + "/" +
                         std::to_string(symbols_.functor_arity(f)));
  }
  predicates_[it->second].slg_entry = true;
  entry_cache_.emplace(f, entry);
  return entry;
}

namespace {

void check_callable(const Store& s, Cell c, const char* where) {
  if (c.tag == Tag::Ref) {
    throw InstantiationError(std::string(where) + ": unbound tabled call");
  }
  if (!s.is_callable(c)) {
    throw TypeError(std::string(where) + ": callable expected, found " +
                    s.describe(c));
  }
}

}  // namespace

bool Engine::do_slg(Cell goal, std::int32_t next) {
  Cell call = store_.deref(store_.arg(goal, 0));
  check_callable(store_, call, "slg/1");
  entry_functor(call);
  FrozenTerm key = store_.freeze(call);
  if (auto id = tables_.find(key)) {
    const GeneratorEntry& e = tables_.entry(*id);
    if (e.status == GeneratorStatus::Evaluating) {
      if (options_.mode == TranslationMode::General) {
        throw InternalError("slg/1 reached " + describe(call) +
                            " while its table is still being evaluated");
      }
      ++counters_.incomplete_reads;
    }
    ChoicePoint& cp = push_cp(ChoicePoint::Kind::Answers);
    cp.gen = *id;
    cp.goal = call;
    cp.next = next;
    cp.limit = e.answers.size();
    return retry_answers(cp);
  }
  GeneratorId id = tables_.create(std::move(key), store_.trail_size());
  ++counters_.generators;
  return launch_generator(id, call, next, true);
}

bool Engine::do_slgcall(Cell goal, std::int32_t next) {
  Cell cont = store_.deref(store_.arg(goal, 0));
  const std::uint32_t want = options_.mode == TranslationMode::General ? 4 : 3;
  if (cont.tag != Tag::Str ||
      symbols_.functor_arity(store_.functor_of(cont)) != want) {
    throw TypeError("slgcall/1: continuation of arity " +
                    std::to_string(want) + " expected, found " +
                    describe(cont));
  }
  Cell pending = store_.deref(store_.arg(cont, 2));
  check_callable(store_, pending, "slgcall/1");
  entry_functor(pending);
  FrozenTerm key = store_.freeze(pending);
  auto id = tables_.find(key);
  if (!id) {
    GeneratorId g = tables_.create(std::move(key), store_.trail_size());
    ++counters_.generators;
    capture(g, cont);
    return launch_generator(g, pending, next, false);
  }
  const GeneratorEntry& e = tables_.entry(*id);
  if (e.status == GeneratorStatus::Evaluating) {
    capture(*id, cont);
    tables_.add_dependency(*id);
    return false;
  }
  // Complete: consume the answers directly; nothing needs to be captured.
  ChoicePoint& cp = push_cp(ChoicePoint::Kind::Answers);
  cp.gen = *id;
  cp.goal = pending;
  cp.cont = cont;
  cp.resume = true;
  cp.next = next;
  cp.limit = e.answers.size();
  return retry_answers(cp);
}

bool Engine::do_answer(Cell goal) {
  Cell id = store_.deref(store_.arg(goal, 0));
  if (id.tag == Tag::Ref) {
    throw InstantiationError("answer/2: unbound generator identifier");
  }
  if (id.tag != Tag::Int || id.value < 0 ||
      !tables_.contains(static_cast<GeneratorId>(id.value))) {
    throw InternalError("answer/2: no generator " + describe(id));
  }
  if (tables_.add_answer(static_cast<GeneratorId>(id.value),
                         store_.freeze(store_.arg(goal, 1)))) {
    ++counters_.answers;
  }
  return false;
}

void Engine::capture(GeneratorId target, Cell cont) {
  StoredContinuation sc;
  sc.term = store_.freeze(cont);
  sc.binding_cells = store_.node_count(store_.arg(cont, 1));
  sc.call_cells = store_.node_count(store_.arg(cont, 2));
  if (symbols_.functor_arity(store_.functor_of(cont)) > 3) {
    sc.call_cells += store_.node_count(store_.arg(cont, 3));
  }
  ++counters_.suspensions;
  counters_.e_cells += sc.binding_cells;
  counters_.h_cells += sc.call_cells;
  const std::size_t mark = tables_.entry(target).trail_mark;
  const std::size_t trail = store_.trail_size();
  counters_.trail_at_suspend += trail > mark ? trail - mark : 0;
  tables_.add_continuation(target, std::move(sc));
}

bool Engine::launch_generator(GeneratorId id, Cell call, std::int32_t next,
                              bool from_slg) {
  FunctorId entry = entry_functor(call);
  ChoicePoint& cp = push_cp(ChoicePoint::Kind::Generator);
  cp.gen = id;
  cp.goal = call;
  cp.next = next;
  cp.from_slg = from_slg;
  Cell g = store_.new_struct(
      entry, {call, Cell::integer(static_cast<std::int64_t>(id))});
  cur_ = push_frame(g, push_frame(fail_atom_, kDone));
  return true;
}

void Engine::to_answers(ChoicePoint& cp, std::size_t limit) {
  cp.kind = ChoicePoint::Kind::Answers;
  cp.alt = 0;
  cp.limit = limit;
  cp.resume = false;
}

// Reached once the generator's clauses are exhausted, and again after every
// resumption it schedules.
bool Engine::retry_generator(ChoicePoint& cp) {
  const GeneratorId g = cp.gen;
  const GeneratorEntry& e = tables_.entry(g);
  if (e.status == GeneratorStatus::Evaluating && !tables_.is_leader(g)) {
    // Part of an older generator's group, which will finish the work.
    if (!cp.from_slg) {
      cps_.pop_back();
      return false;
    }
    if (options_.mode == TranslationMode::General) {
      throw InternalError("table for " + describe(cp.goal) +
                          " depends on an enclosing evaluation");
    }
    ++counters_.incomplete_reads;
    to_answers(cp, e.answers.size());
    return retry_answers(cp);
  }
  if (e.status == GeneratorStatus::Evaluating) {
    if (auto item = tables_.next_work(g)) {
      tick();
      ++counters_.resumptions;
      const GeneratorEntry& owner = tables_.entry(item->generator);
      Cell k = store_.thaw(owner.continuations[item->continuation].term);
      Cell a = store_.thaw(owner.answers[item->answer]);
      if (!store_.unify(store_.arg(k, 2), a)) return false;
      cur_ = push_frame(k, push_frame(fail_atom_, kDone));
      return true;
    }
    tables_.complete(g);
  }
  if (!cp.from_slg) {
    cps_.pop_back();
    return false;
  }
  to_answers(cp, e.answers.size());
  return retry_answers(cp);
}

bool Engine::retry_answers(ChoicePoint& cp) {
  if (cp.alt >= cp.limit) {
    cps_.pop_back();
    return false;
  }
  const std::size_t index = cp.alt++;
  const GeneratorId g = cp.gen;
  const Cell target = cp.goal;
  const Cell cont = cp.cont;
  const bool resume = cp.resume;
  const std::int32_t next = cp.next;
  if (cp.alt >= cp.limit) cps_.pop_back();
  Cell a = store_.thaw(tables_.entry(g).answers[index]);
  if (!store_.unify(target, a)) return false;
  if (resume) {
    tick();
    ++counters_.resumptions;
    cur_ = push_frame(cont, next);
  } else {
    cur_ = next;
  }
  return true;
}

}  // namespace ccall
