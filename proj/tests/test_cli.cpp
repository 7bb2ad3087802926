#include <gtest/gtest.h>

#include <sstream>

#include "ccall/cli.hpp"
#include "test_support.hpp"

using namespace ccall;
using namespace testing_support;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ccall");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const std::string kLostAnswerFile = data_path("lost_answer.pl");

}  // namespace

TEST(Cli, LostAnswerGeneral) {
  Result r = cli({kLostAnswerFile, "--query=t(A)"});
  EXPECT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(lines(r.out), (std::vector<std::string>{"t(0)", "t(1)"}));
}

TEST(Cli, LostAnswerLegacyOracleMismatch) {
  Result r = cli({kLostAnswerFile, "--query=t(A)", "--mode=legacy", "--oracle-check"});
  EXPECT_EQ(r.status, kExitMismatch);
  EXPECT_EQ(lines(r.out), (std::vector<std::string>{"t(0)", "missing: t(1)"}));
}

TEST(Cli, LostAnswerGeneralStatsAndOracle) {
  Result r = cli({kLostAnswerFile, "--query", "t(A)", "--stats", "--oracle-check"});
  EXPECT_EQ(r.status, kExitOk);
  EXPECT_EQ(lines(r.out),
            (std::vector<std::string>{
                "t(0)", "t(1)",
                "suspensions=1 resumptions=2 e_cells=1 h_cells=10 "
                "trail_at_suspend=5 generators=1 answers=2",
                "OK"}));
}

TEST(Cli, GeneratedChain) {
  Result r = cli({"--gen=chain:4", "--query=path(1, X)"});
  EXPECT_EQ(r.status, kExitOk);
  auto got = lines(r.out);
  EXPECT_EQ(std::set<std::string>(got.begin(), got.end()),
            (std::set<std::string>{"path(1,2)", "path(1,3)", "path(1,4)", "path(1,5)"}));
  EXPECT_EQ(got.size(), 4u);
  // Table order is deterministic.
  EXPECT_EQ(cli({"--gen=chain:4", "--query=path(1, X)"}).out, r.out);
}

TEST(Cli, ShowBridgesAndTranslateOnly) {
  Result b = cli({kLostAnswerFile, "--show-bridges"});
  EXPECT_EQ(b.status, kExitOk);
  EXPECT_EQ(b.out, "p/1\n");
  Result f1 = cli({data_path("path.pl"), "--show-bridges"});
  EXPECT_EQ(f1.out, "");

  Result t = cli({kLostAnswerFile, "--translate-only"});
  EXPECT_EQ(t.status, kExitOk);
  EXPECT_EQ(t.out, read_text(data_path("../golden/lost_answer_general.pl")));
  Result l = cli({data_path("path.pl"), "--translate-only", "--mode=legacy"});
  EXPECT_EQ(l.out, read_text(data_path("../golden/path_legacy.pl")));
}

TEST(Cli, Errors) {
  EXPECT_EQ(cli({"/nonexistent/file.pl", "--query=t(A)"}).status, kExitError);
  EXPECT_EQ(cli({kLostAnswerFile, "--query=t(A"}).status, kExitError);
  EXPECT_EQ(cli({kLostAnswerFile, "--query=nope(A)"}).status, kExitError);
  EXPECT_EQ(cli({kLostAnswerFile, "--mode=fast", "--query=t(A)"}).status, kExitError);
  EXPECT_EQ(cli({"--gen=ring:3", "--query=path(X,Y)"}).status, kExitError);
  EXPECT_EQ(cli({"--gen=chain:0", "--query=path(X,Y)"}).status, kExitError);
  EXPECT_EQ(cli({kLostAnswerFile, "--gen=chain:3", "--query=path(X,Y)"}).status, kExitError);
  EXPECT_EQ(cli({kLostAnswerFile}).status, kExitError);  // nothing to do
  Result budget = cli({"--gen=chain:50", "--query=path(X,Y)", "--depth=100"});
  EXPECT_EQ(budget.status, kExitError);
  EXPECT_NE(budget.err.find("error:"), std::string::npos);
}

TEST(Fixtures, Definitions) {
  std::string c2 = gen_fixture(FixtureKind::Chain, 2);
  EXPECT_NE(c2.find("edge(1, 2).\nedge(2, 3).\n"), std::string::npos);
  EXPECT_EQ(c2.find("edge(3, 1)"), std::string::npos);
  std::string y2 = gen_fixture(FixtureKind::Cycle, 2);
  EXPECT_NE(y2.find("edge(1, 2).\nedge(2, 3).\nedge(3, 1).\n"), std::string::npos);
  Program g = parse_program(gen_fixture(FixtureKind::Grid, 2));
  EXPECT_EQ(g.tabled, (std::set<PredId>{{"path", 2}}));
  int edges = 0;
  for (const auto& c : g.clauses) edges += c.head.name() == "edge";
  EXPECT_EQ(edges, 4);  // 2x2 lattice: two right, two down
  EXPECT_THROW(gen_fixture(FixtureKind::Chain, 0), std::invalid_argument);
  EXPECT_EQ(parse_fixture_kind("grid"), FixtureKind::Grid);
  EXPECT_FALSE(parse_fixture_kind("ring").has_value());
}

TEST(Fixtures, ChainAnswerCount) {
  for (int n : {1, 2, 5, 20}) {
    Engine e = make_engine(gen_fixture(FixtureKind::Chain, n), TranslationMode::General);
    EXPECT_EQ(e.solve_all(parse_term("path(X, Y)")).size(),
              static_cast<std::size_t>(n * (n + 1) / 2));
  }
}
