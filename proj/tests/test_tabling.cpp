#include <gtest/gtest.h>

#include "ccall/error.hpp"
#include "ccall/oracle.hpp"
#include "test_support.hpp"

using namespace ccall;
using namespace testing_support;

namespace {

FrozenTerm fz(SymbolTable& s, const std::string& text) {
  return freeze_term(parse_term(text), s);
}

std::set<std::string> answers_of(Engine& e, const std::string& goal) {
  return as_strings(e.solve_all(parse_term(goal)));
}

std::string edges_program(const std::vector<Edge>& edges, const std::string& rules) {
  std::string s = rules;
  for (const auto& [a, b] : edges) {
    s += "edge(" + std::to_string(a) + ", " + std::to_string(b) + ").\n";
  }
  return s;
}

// Resumptions for a right-recursive closure query, counted from the oracle's
// answer sets: every open call path(u, _) holds one consumer per edge (u, v),
// which runs once per answer of path(v, _).
std::uint64_t oracle_resumptions(const GroundFactStore& facts,
                                 const std::vector<Edge>& edges,
                                 const std::set<int>& open_calls) {
  std::uint64_t n = 0;
  for (int u : open_calls) {
    for (const auto& [a, v] : edges) {
      if (a != u) continue;
      n += facts.matching(parse_term("path(" + std::to_string(v) + ", _)")).size();
    }
  }
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// TableSpace

TEST(TableSpace, CreateFindAndDedup) {
  SymbolTable s;
  TableSpace ts;
  GeneratorId g = ts.create(fz(s, "t(A)"), 0);
  EXPECT_EQ(ts.find(fz(s, "t(B)")), g);
  EXPECT_FALSE(ts.find(fz(s, "t(0)")).has_value());
  EXPECT_THROW(ts.create(fz(s, "t(C)"), 0), InternalError);
  EXPECT_TRUE(ts.add_answer(g, fz(s, "t(0)")));
  EXPECT_FALSE(ts.add_answer(g, fz(s, "t(0)")));
  EXPECT_EQ(ts.entry(g).answers.size(), 1u);
}

TEST(TableSpace, ContinuationsMeetEveryAnswer) {
  SymbolTable s;
  TableSpace ts;
  GeneratorId g = ts.create(fz(s, "t(A)"), 0);
  ts.add_answer(g, fz(s, "t(0)"));
  ts.add_continuation(g, {fz(s, "k(Id, [], t(B), [])"), 0, 2});
  ts.add_answer(g, fz(s, "t(1)"));
  ts.add_answer(g, fz(s, "t(1)"));  // duplicate: no work
  EXPECT_EQ(ts.stored_continuations(), 1u);

  std::vector<std::uint32_t> seen;
  while (auto w = ts.next_work(g)) seen.push_back(w->answer);
  EXPECT_EQ(seen, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_FALSE(ts.has_pending_work(g));
}

TEST(TableSpace, CompletionRules) {
  SymbolTable s;
  TableSpace ts;
  GeneratorId a = ts.create(fz(s, "a(X)"), 0);
  GeneratorId b = ts.create(fz(s, "b(X)"), 0);
  EXPECT_TRUE(ts.is_leader(b));
  ts.add_dependency(a);  // b depends on a
  EXPECT_FALSE(ts.is_leader(b));
  EXPECT_TRUE(ts.is_leader(a));
  EXPECT_THROW(ts.complete(b), InternalError);

  ts.add_continuation(a, {fz(s, "k(Id, [], a(Y), [])"), 0, 2});
  ts.add_answer(a, fz(s, "a(1)"));
  EXPECT_THROW(ts.complete(a), InternalError);  // pending work
  while (ts.next_work(a)) {
  }
  ts.complete(a);
  EXPECT_EQ(ts.entry(a).status, GeneratorStatus::Complete);
  EXPECT_EQ(ts.entry(b).status, GeneratorStatus::Complete);
  EXPECT_TRUE(ts.entry(a).continuations.empty());
  EXPECT_EQ(ts.completion_depth(), 0u);
  EXPECT_THROW(ts.add_answer(a, fz(s, "a(2)")), InternalError);
}

TEST(TableSpace, AbandonDropsIncomplete) {
  SymbolTable s;
  TableSpace ts;
  GeneratorId g = ts.create(fz(s, "a(X)"), 0);
  ts.abandon_incomplete();
  EXPECT_EQ(ts.entry(g).status, GeneratorStatus::Abandoned);
  EXPECT_FALSE(ts.find(fz(s, "a(X)")).has_value());
  EXPECT_EQ(ts.completion_depth(), 0u);
}

// ---------------------------------------------------------------------------
// Engine with tabling

TEST(Tabling, LostAnswerGeneral) {
  Engine e = make_engine(kLostAnswer, TranslationMode::General);
  EXPECT_EQ(as_list(e.solve_all(parse_term("t(A)"))),
            (std::vector<std::string>{"t(0)", "t(1)"}));
  const Counters& c = e.counters();
  EXPECT_EQ(c.suspensions, 1u);
  EXPECT_EQ(c.resumptions, 2u);
  EXPECT_EQ(c.generators, 1u);
  EXPECT_EQ(c.answers, 2u);
  EXPECT_EQ(c.suspensions, e.tables().stored_continuations());
  auto id = e.find_table(parse_term("t(X)"));
  ASSERT_TRUE(id.has_value());
  EXPECT_EQ(e.tables().entry(*id).status, GeneratorStatus::Complete);
  EXPECT_TRUE(e.table_continuations(*id).empty());
}

TEST(Tabling, LostAnswerLegacyLosesAnswer) {
  Engine e = make_engine(kLostAnswer, TranslationMode::Legacy);
  EXPECT_EQ(answers_of(e, "t(A)"), (std::set<std::string>{"t(0)"}));
  EXPECT_GT(e.counters().incomplete_reads, 0u);
}

TEST(Tabling, TwoCycle) {
  const char* prog =
      ":- table path/2.\n"
      "path(X, Z) :- edge(X, Y), path(Y, Z).\npath(X, Z) :- edge(X, Z).\n"
      "edge(a, b).\nedge(b, a).\n";
  Engine e = make_engine(prog, TranslationMode::General);
  auto all = e.solve_all(parse_term("path(X, Y)"));
  EXPECT_EQ(all.size(), 4u);
  EXPECT_EQ(as_strings(all), (std::set<std::string>{"path(a,b)", "path(a,a)",
                                                    "path(b,b)", "path(b,a)"}));
}

TEST(Tabling, DuplicateAnswersCollapse) {
  Engine e = make_engine(":- table t/1.\nt(0).\nt(0).\nt(X) :- X = 0.",
                         TranslationMode::General);
  EXPECT_EQ(as_list(e.solve_all(parse_term("t(A)"))),
            (std::vector<std::string>{"t(0)"}));
  EXPECT_EQ(e.counters().answers, 1u);
}

TEST(Tabling, NonRecursiveCompletesAlone) {
  Engine e = make_engine(":- table t/1.\nt(X) :- q(X).\nq(1).\nq(2).",
                         TranslationMode::General);
  EXPECT_EQ(answers_of(e, "t(X)"), (std::set<std::string>{"t(1)", "t(2)"}));
  EXPECT_EQ(e.counters().suspensions, 0u);
  EXPECT_EQ(e.tables().completion_depth(), 0u);
}

TEST(Tabling, MutualRecursionCompletesAsGroup) {
  const char* prog =
      ":- table r/2, s/2.\n"
      "r(X, Y) :- e(X, Y).\n"
      "r(X, Y) :- s(X, Z), e(Z, Y).\n"
      "s(X, Y) :- r(X, Y).\n"
      "s(X, Y) :- e(Y, X).\n"
      "e(1, 2).\ne(2, 3).\ne(3, 1).\ne(4, 4).\n";
  Program p = parse_program(prog);
  GroundFactStore facts = bottom_up_eval(p);
  for (auto mode : {TranslationMode::General, TranslationMode::Legacy}) {
    Engine e = make_engine(prog, mode);
    for (const char* q : {"r(1, Y)", "s(X, Y)", "r(X, Y)"}) {
      Term call = parse_term(q);
      auto cmp = compare_answer_sets(e.solve_all(call), facts, call);
      EXPECT_TRUE(cmp.equal) << to_string(mode) << " " << q;
    }
    EXPECT_EQ(e.counters().suspensions, e.tables().stored_continuations());
  }
}

TEST(Tabling, ResumptionsRestartFromStoredCopy) {
  // A single consumer feeds every answer back into its own table; a copy
  // mutated by the first resumption would stop the count at n(1).
  Engine e = make_engine(":- table n/1.\nn(0).\nn(X) :- n(Y), Y < 5, X is Y + 1.",
                         TranslationMode::General);
  EXPECT_EQ(as_list(e.solve_all(parse_term("n(X)"))),
            (std::vector<std::string>{"n(0)", "n(1)", "n(2)", "n(3)", "n(4)", "n(5)"}));
  EXPECT_EQ(e.counters().suspensions, 1u);
  EXPECT_EQ(e.counters().resumptions, 6u);
}

TEST(Tabling, CompletionPurity) {
  Engine e = make_engine(kLostAnswer, TranslationMode::General);
  auto first = e.solve_all(parse_term("t(A)"));
  Counters before = e.counters();
  auto second = e.solve_all(parse_term("t(B)"));
  Counters delta = e.counters() - before;
  EXPECT_EQ(as_list(first), as_list(second));
  EXPECT_EQ(delta.slg_clause_resolutions, 0u);
  EXPECT_EQ(delta.generators, 0u);
  EXPECT_EQ(delta.suspensions, 0u);
}

TEST(Tabling, CompletedGroupMembersAreTableReads) {
  std::string prog = gen_fixture(FixtureKind::Cycle, 4);
  Engine e = make_engine(prog, TranslationMode::General);
  e.solve_all(parse_term("path(1, X)"));
  Counters before = e.counters();
  for (int n = 1; n <= 5; ++n) {
    EXPECT_EQ(e.solve_all(parse_term("path(" + std::to_string(n) + ", X)")).size(), 5u);
  }
  EXPECT_EQ((e.counters() - before).slg_clause_resolutions, 0u);
}

TEST(Tabling, ChainResumptionsMatchOracle) {
  std::vector<Edge> edges{{1, 2}, {2, 3}};
  std::string prog = path_program(edges);
  GroundFactStore facts = bottom_up_eval(parse_program(prog));
  Engine e = make_engine(prog, TranslationMode::General);
  e.solve_all(parse_term("path(1, Z)"));
  // Open calls: path(1,_), path(2,_), path(3,_).
  EXPECT_EQ(e.counters().resumptions, oracle_resumptions(facts, edges, {1, 2, 3}));
  EXPECT_EQ(e.counters().resumptions, 1u);
}

TEST(Tabling, GeneralModeRejectsSlgOnEvaluatingCall) {
  // Hand-written translation that re-enters a running generator through
  // slg/1 instead of slgcall/1.
  const char* prog =
      "t(X) :- slg(t(X)).\n"
      "slg_t(t(X), Id) :- t(X), answer(Id, t(X)).\n"
      "slg_t(t(0), Id) :- answer(Id, t(0)).\n";
  Engine general(parse_program(prog), {.mode = TranslationMode::General});
  EXPECT_THROW(general.solve_all(parse_term("t(X)")), InternalError);
  Engine legacy(parse_program(prog), {.mode = TranslationMode::Legacy});
  EXPECT_EQ(as_list(legacy.solve_all(parse_term("t(X)"))),
            (std::vector<std::string>{"t(0)"}));
}

TEST(Tabling, MalformedContinuation) {
  const char* prog =
      "t(X) :- slg(t(X)).\n"
      "slg_t(t(0), Id) :- answer(Id, t(0)).\n"
      "q :- slgcall(k(1, [], t(X))).\n"
      "k(_, [], t(_)).\n";
  Engine e(parse_program(prog), {.mode = TranslationMode::General});
  EXPECT_THROW(e.solve_all(parse_term("q")), Error);
}

TEST(Tabling, StepBudgetAbandonsTables) {
  std::string prog = gen_fixture(FixtureKind::Chain, 50);
  Engine e = make_engine(prog, TranslationMode::General, 500);
  EXPECT_THROW(e.solve_all(parse_term("path(X, Y)")), ResourceError);
  EXPECT_EQ(e.tables().completion_depth(), 0u);
  EXPECT_FALSE(e.find_table(parse_term("path(X, Y)")).has_value());
}

// ---------------------------------------------------------------------------
// Properties over random graphs

class TablingProperty : public ::testing::TestWithParam<int> {};

TEST_P(TablingProperty, ClosureAgreesWithOracle) {
  std::mt19937 rng(GetParam());
  for (int round = 0; round < 10; ++round) {
    auto edges = random_graph(rng, 2 + static_cast<int>(rng() % 7), 0.3);
    for (auto rec : {Recursion::Right, Recursion::Left, Recursion::Double}) {
      std::string prog = path_program(edges, rec);
      GroundFactStore facts = bottom_up_eval(parse_program(prog));
      for (auto mode : {TranslationMode::General, TranslationMode::Legacy}) {
        Engine e = make_engine(prog, mode);
        for (const char* q : {"path(X, Y)", "path(1, Y)", "path(X, 2)"}) {
          Term call = parse_term(q);
          auto got = e.solve_all(call);
          // Duplicate-free: every answer is distinct.
          EXPECT_EQ(as_strings(got).size(), got.size());
          EXPECT_TRUE(compare_answer_sets(got, facts, call).equal)
              << prog << to_string(mode) << " " << q;
        }
        EXPECT_EQ(e.counters().suspensions, e.tables().stored_continuations());
        for (GeneratorId g = 0; g < e.tables().size(); ++g) {
          const auto& entry = e.tables().entry(g);
          EXPECT_EQ(entry.answer_index.size(), entry.answers.size());
          EXPECT_TRUE(entry.continuations.empty());
        }
      }
    }
  }
}

TEST_P(TablingProperty, RightRecursionResumptionCount) {
  std::mt19937 rng(GetParam() + 100);
  for (int round = 0; round < 10; ++round) {
    auto edges = random_graph(rng, 2 + static_cast<int>(rng() % 9), 0.3);
    std::string prog = path_program(edges);
    GroundFactStore facts = bottom_up_eval(parse_program(prog));
    Engine e = make_engine(prog, TranslationMode::General);
    e.solve_all(parse_term("path(X, Y)"));
    EXPECT_EQ(e.counters().resumptions, expected_right_resumptions(edges)) << prog;

    // The same count from oracle answer sets: the open call path(X, Y) holds
    // one consumer per edge, and so does every path(v, _) with v reached.
    std::set<int> targets;
    for (const auto& [a, b] : edges) targets.insert(b);
    std::uint64_t n = oracle_resumptions(facts, edges, targets);
    for (const auto& [u, v] : edges) {
      n += facts.matching(parse_term("path(" + std::to_string(v) + ", _)")).size();
    }
    EXPECT_EQ(e.counters().resumptions, n);

    // Single-source query: open calls are the source and what it reaches.
    Engine s = make_engine(prog, TranslationMode::General);
    s.solve_all(parse_term("path(1, Y)"));
    std::set<int> open = reach_plus(edges, 1);
    open.insert(1);
    EXPECT_EQ(s.counters().resumptions, oracle_resumptions(facts, edges, open)) << prog;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, TablingProperty, ::testing::Range(1, 6));
