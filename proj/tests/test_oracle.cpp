#include <gtest/gtest.h>

#include "ccall/error.hpp"
#include "ccall/oracle.hpp"
#include "test_support.hpp"

using namespace ccall;
using namespace testing_support;

namespace {

std::set<std::string> facts_of(const GroundFactStore& s, const PredId& p) {
  std::set<std::string> out;
  for (const auto& t : s.facts(p)) out.insert(print_term(t, {.compact = true}));
  return out;
}

}  // namespace

TEST(Oracle, LostAnswer) {
  GroundFactStore s = bottom_up_eval(parse_program(kLostAnswer));
  EXPECT_EQ(facts_of(s, {"t", 1}), (std::set<std::string>{"t(0)", "t(1)"}));
  EXPECT_EQ(facts_of(s, {"p", 1}), (std::set<std::string>{"p(0)"}));
}

TEST(Oracle, PathTwoCycle) {
  std::string prog = std::string(kPath) + "edge(a, b).\nedge(b, a).\n";
  GroundFactStore s = bottom_up_eval(parse_program(prog));
  EXPECT_EQ(facts_of(s, {"path", 2}), (std::set<std::string>{
                                          "path(a,b)", "path(a,a)", "path(b,b)",
                                          "path(b,a)"}));
}

TEST(Oracle, EmptyProgram) {
  GroundFactStore s = bottom_up_eval(Program{});
  EXPECT_EQ(s.size(), 0u);
  EXPECT_TRUE(s.predicates().empty());
}

TEST(Oracle, RejectsNonRangeRestricted) {
  for (const char* bad : {"p(X).", "p(X) :- X < 1.", "p(Y) :- q(X).\nq(1).",
                          "p(X) :- X is Y + 1."}) {
    try {
      bottom_up_eval(parse_program(bad));
      ADD_FAILURE() << "accepted " << bad;
    } catch (const OracleError& e) {
      EXPECT_NE(std::string(e.what()).find("range-restricted"), std::string::npos);
    }
  }
  // Unification and is/2 with bound inputs are fine.
  EXPECT_NO_THROW(bottom_up_eval(parse_program(
      "q(1).\np(X, Y, Z) :- q(X), Y = f(X), Z is X * 2.\nr(X) :- q(Y), Y = X.")));
}

TEST(Oracle, RejectsTablingPrimitives) {
  EXPECT_THROW(bottom_up_eval(parse_program("t(X) :- slg(t(X)).")), OracleError);
}

TEST(Oracle, IterationCap) {
  // Unbounded term size: nat(0), nat(1), ...
  Program p = parse_program("nat(0).\nnat(Y) :- nat(X), Y is X + 1.");
  EXPECT_THROW(bottom_up_eval(p, {.max_iterations = 50}), ResourceError);
}

TEST(Oracle, ChainCountFormula) {
  for (int n = 1; n <= 12; ++n) {
    GroundFactStore s = bottom_up_eval(parse_program(gen_fixture(FixtureKind::Chain, n)));
    EXPECT_EQ(s.facts({"path", 2}).size(), static_cast<std::size_t>(n * (n + 1) / 2));
  }
}

TEST(Oracle, CompareAnswerSets) {
  GroundFactStore s = bottom_up_eval(parse_program(kLostAnswer));
  Term call = parse_term("t(A)");
  AnswerComparison ok =
      compare_answer_sets({parse_term("t(1)"), parse_term("t(0)")}, s, call);
  EXPECT_TRUE(ok.equal);
  AnswerComparison lost = compare_answer_sets({parse_term("t(0)")}, s, call);
  EXPECT_FALSE(lost.equal);
  ASSERT_EQ(lost.missing.size(), 1u);
  EXPECT_EQ(print_term(lost.missing[0]), "t(1)");
  AnswerComparison extra = compare_answer_sets(
      {parse_term("t(0)"), parse_term("t(1)"), parse_term("t(7)")}, s, call);
  ASSERT_EQ(extra.extra.size(), 1u);
  EXPECT_TRUE(extra.missing.empty());
  // Only instances of the call take part.
  EXPECT_TRUE(compare_answer_sets({parse_term("t(1)")}, s, parse_term("t(1)")).equal);
}

TEST(Oracle, EngineVsOracleLostAnswer) {
  GroundFactStore s = bottom_up_eval(parse_program(kLostAnswer));
  Term call = parse_term("t(A)");
  Engine g = make_engine(kLostAnswer, TranslationMode::General);
  EXPECT_TRUE(compare_answer_sets(g.solve_all(call), s, call).equal);
  Engine l = make_engine(kLostAnswer, TranslationMode::Legacy);
  auto cmp = compare_answer_sets(l.solve_all(call), s, call);
  EXPECT_FALSE(cmp.equal);
  ASSERT_EQ(cmp.missing.size(), 1u);
  EXPECT_EQ(print_term(cmp.missing[0]), "t(1)");
}

class OracleProperty : public ::testing::TestWithParam<int> {};

TEST_P(OracleProperty, MonotoneAndIdempotent) {
  std::mt19937 rng(GetParam());
  for (int round = 0; round < 10; ++round) {
    auto edges = random_graph(rng, 2 + static_cast<int>(rng() % 7), 0.3);
    for (auto rec : {Recursion::Right, Recursion::Left, Recursion::Double}) {
      Program p = parse_program(path_program(edges, rec));
      std::vector<GroundFactStore> rounds;
      GroundFactStore fix = bottom_up_eval(
          p, {.on_round = [&](const GroundFactStore& s) { rounds.push_back(s); }});
      ASSERT_FALSE(rounds.empty());
      for (std::size_t i = 1; i < rounds.size(); ++i) {
        for (const auto& pred : rounds[i - 1].predicates()) {
          for (const auto& f : rounds[i - 1].facts(pred)) {
            EXPECT_TRUE(rounds[i].contains(f));
          }
        }
      }
      // The last round is the stability check: it added nothing.
      if (rounds.size() >= 2) {
        EXPECT_EQ(rounds.back(), rounds[rounds.size() - 2]);
      }
      EXPECT_EQ(rounds.back(), fix);
      EXPECT_EQ(fix.facts({"path", 2}).size(), closure_answers(edges).size());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, OracleProperty, ::testing::Range(1, 6));
