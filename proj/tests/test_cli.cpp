#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "semijoin/cli.hpp"
#include "semijoin/repl.hpp"
#include "semijoin/semijoin.hpp"

using namespace semijoin;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("semijoin_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    cli::write_file(path(name), text);
    return path(name);
  }

  std::string unary(const std::string& name, const std::vector<std::string>& values) const {
    nlohmann::json tuples = nlohmann::json::array();
    for (const auto& v : values) tuples.push_back({v});
    return write(name, nlohmann::json{{"relations", {{"S", {{"arity", 1}, {"tuples", tuples}}}}}}.dump());
  }

  // fig1 documents via the corpus command.
  std::pair<std::string, std::string> fig1() const {
    EXPECT_EQ(run({"corpus", "emit", "--name", "fig1", "--out", path("fig1")}).code, 0);
    return {path("fig1_A.json"), path("fig1_B.json")};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EvalDistinctPairOnSingleton) {
  CliResult r = run({"eval", unary("s.json", {"a"}), "project[](semijoin[x1!=y1](rel S, rel S))"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "false\n");
}

TEST_F(CliTest, EvalPrintsSortedTuples) {
  CliResult r = run({"eval", unary("s.json", {"b", "a"}), "semijoin[x1!=y1](rel S, rel S)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(a)\n(b)\n");
}

TEST_F(CliTest, EvalAtLeastTwo) {
  std::string db = unary("s.json", {"a", "b"});
  CliResult r = run({"eval", db, "project[](" + to_string(at_least(2)) + ")"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "true\n");
}

TEST_F(CliTest, EvalGuardedFormula) {
  auto [a, b] = fig1();
  CliResult r = run({"eval", a, "exists y (R(x,y) & exists z (R(y,z)))", "--lang", "gf"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(a)\n(d)\n");
  CliResult v = run({"eval", a, "R(x,y) & x = x", "--lang", "gf", "--vars", "y,x"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("(b,a)"), std::string::npos);
}

TEST_F(CliTest, EvalFromFile) {
  std::string db = unary("s.json", {"a"});
  CliResult r = run({"eval", db, write("e.sa", "rel S\n"), "--file"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(a)\n");
}

TEST_F(CliTest, ErrorExitCodes) {
  std::string db = unary("s.json", {"a"});
  CliResult parse = run({"eval", db, "semijoin[x1!=](rel S, rel S)"});
  EXPECT_EQ(parse.code, 2);
  EXPECT_NE(parse.err.find("line 1"), std::string::npos);
  EXPECT_EQ(run({"eval", db, "rel Q"}).code, 2);
  EXPECT_EQ(run({"eval", path("missing.json"), "rel S"}).code, 1);
  EXPECT_EQ(run({"eval", write("bad.json", "{"), "rel S"}).code, 2);
  EXPECT_EQ(run({"eval", db}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, HelpExitsZero) {
  CliResult r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sat-search"), std::string::npos);
}

TEST_F(CliTest, GameFig1Duplicator) {
  auto [a, b] = fig1();
  CliResult r = run({"game", a, b, "--rounds", "inf"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "DUPLICATOR");
  EXPECT_EQ(run({"-q", "game", a, b}).out, "DUPLICATOR\n");
}

TEST_F(CliTest, GameSingletonVersusPairReportsRank) {
  std::string a = unary("a.json", {"a"}), b = unary("b.json", {"a", "b"});
  CliResult r = run({"game", a, b});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("SPOILER\nspoiler rank: 2\n"), std::string::npos);
  CliResult one = run({"game", a, b, "--start-a", "(a)", "--start-b", "(a)"});
  EXPECT_NE(one.out.find("spoiler rank: 1\n"), std::string::npos);
  EXPECT_EQ(run({"-q", "game", a, b, "--rounds", "1"}).out, "DUPLICATOR\n");
}

TEST_F(CliTest, GameZeroRoundsMatchesRound0) {
  std::string a = unary("a.json", {"a"}), b = write("b.json", R"({"relations": {"S": {"arity": 1, "tuples": []}}})");
  EXPECT_EQ(run({"-q", "game", a, b, "--rounds", "0"}).out, "SPOILER\n");
  std::string c = unary("c.json", {"z", "y"});
  EXPECT_EQ(run({"-q", "game", a, c, "--rounds", "0"}).out, "DUPLICATOR\n");
}

TEST_F(CliTest, GameStartOutsideTupleSpace) {
  auto [a, b] = fig1();
  EXPECT_EQ(run({"game", a, b, "--start-a", "(b,a)"}).code, 2);
  EXPECT_EQ(run({"game", a, b, "--start-a", "(q)"}).code, 2);
  EXPECT_EQ(run({"game", a, b, "--rounds", "many"}).code, 2);
}

TEST_F(CliTest, GameReport) {
  std::string a = unary("a.json", {"a"}), b = unary("b.json", {"a", "b"});
  std::string report = path("report.json");
  ASSERT_EQ(run({"game", a, b, "--report", report, "--expression", "--strategy"}).code, 0);
  auto doc = nlohmann::json::parse(cli::read_file(report));
  EXPECT_EQ(doc["verdict"]["winner"], "SPOILER");
  EXPECT_EQ(doc["verdict"]["spoiler_rank"], 2);
  EXPECT_EQ(doc["omega"], "{=}");
  EXPECT_TRUE(doc.contains("distinguishing_expression"));
  EXPECT_TRUE(doc["strategy"].is_array());
  SAExpr e = parse_sa(doc["distinguishing_expression"].get<std::string>());
  EXPECT_FALSE(eval_sa(e, cli::load_database_file(a)).empty());
  EXPECT_TRUE(eval_sa(e, cli::load_database_file(b)).empty());
}

TEST_F(CliTest, GameReportOnFig1HasStrategy) {
  auto [a, b] = fig1();
  std::string report = path("r.json");
  ASSERT_EQ(run({"game", a, b, "--report", report, "--strategy"}).code, 0);
  auto doc = nlohmann::json::parse(cli::read_file(report));
  EXPECT_EQ(doc["verdict"]["winner"], "DUPLICATOR");
  EXPECT_EQ(doc["tuple_space"]["A"].size(), 13u);
  // 25 fixpoint configurations, 26 spoiler moves from each.
  EXPECT_EQ(doc["fixpoint"].size(), 25u);
  EXPECT_EQ(doc["strategy"].size(), 25u * 26u);
}

TEST_F(CliTest, OrderedCorpusUsesOrderByDefault) {
  ASSERT_EQ(run({"corpus", "emit", "--name", "ordered-transitivity", "--m", "3", "--out", path("ot")}).code, 0);
  CliResult r = run({"game", path("ot_A.json"), path("ot_B.json"), "--rounds", "1"});
  EXPECT_NE(r.out.find("DUPLICATOR"), std::string::npos);
  EXPECT_NE(r.out.find("omega: {=,<}"), std::string::npos);
}

TEST_F(CliTest, Distinguish) {
  std::string a = unary("a.json", {"a"}), b = unary("b.json", {"a", "b"});
  CliResult r = run({"-q", "distinguish", a, b});
  EXPECT_EQ(r.code, 0);
  SAExpr e = parse_sa(r.out);
  EXPECT_FALSE(eval_sa(e, cli::load_database_file(a)).empty());
  EXPECT_TRUE(eval_sa(e, cli::load_database_file(b)).empty());
  auto [fa, fb] = fig1();
  EXPECT_EQ(run({"distinguish", fa, fb}).out, "none: the duplicator wins the unbounded game\n");
}

TEST_F(CliTest, TranslateBothDirections) {
  CliResult f = run({"translate", "--direction", "sa2gf", "--schema", "R/2,S/1", "semijoin[x2=y1](rel R, rel S)"});
  EXPECT_EQ(f.code, 0);
  Formula phi = parse_gf(f.out);
  EXPECT_TRUE(check_guarded(phi, Schema{{"R", 2}, {"S", 1}}));
  CliResult s = run({"translate", "--direction", "gf2sa", "--schema", "R/2,S/1", "--rel", "R", "--injection", "1:2,2:1",
               "x1 = x2"});
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(s.out, "select[x1=x2](project[2,1](rel R))\n");
  CliResult sentence = run({"translate", "--direction", "gf2sa", "--schema", "S/1", "--rel", "S", "exists y (S(y))"});
  EXPECT_EQ(sentence.code, 0);
  EXPECT_EQ(check_sa(parse_sa(sentence.out), Schema{{"S", 1}}).arity, 0u);
}

TEST_F(CliTest, TranslateErrors) {
  EXPECT_EQ(run({"translate", "--direction", "sa2gf", "--schema", "S/1", "semijoin[x1!=y1](rel S, rel S)"}).code, 2);
  EXPECT_EQ(run({"translate", "--direction", "sa2gf", "rel S"}).code, 2);
  EXPECT_EQ(run({"translate", "--direction", "gf2sa", "--schema", "S/1", "--rel", "S", "S(x1)"}).code, 2);
  EXPECT_EQ(run({"translate", "--direction", "sideways", "--schema", "S/1", "rel S"}).code, 2);
  CliResult big = run({"translate", "--direction", "sa2gf", "--schema", "T/3", "--max-size", "3",
                 "semijoin[true](rel T, project[1](rel T))"});
  EXPECT_EQ(big.code, 1);
}

TEST_F(CliTest, CorpusListAndEmit) {
  CliResult l = run({"corpus", "list"});
  EXPECT_EQ(l.code, 0);
  for (const auto& name : corpus_names()) EXPECT_NE(l.out.find(name + ":"), std::string::npos);
  CliResult both = run({"corpus", "emit", "--name", "cartesian"});
  auto doc = nlohmann::json::parse(both.out);
  EXPECT_TRUE(doc.contains("A") && doc.contains("B"));
  CliResult side = run({"corpus", "emit", "--name", "fig1", "--side", "B"});
  EXPECT_EQ(side.out, dump_database(fig1_databases().second));
  EXPECT_EQ(run({"corpus", "emit", "--name", "nothing"}).code, 2);
  EXPECT_EQ(run({"corpus"}).code, 2);
}

TEST_F(CliTest, SearchCartesian) {
  CliResult r = run({"search", "--query", "cartesian", "--max-values", "8", "--out", path("w")});
  EXPECT_EQ(r.code, 0);
  Database a = cli::load_database_file(path("w_A.json")), b = cli::load_database_file(path("w_B.json"));
  EXPECT_TRUE(is_cartesian_closed(a));
  EXPECT_FALSE(is_cartesian_closed(b));
  CliResult g = run({"-q", "game", path("w_A.json"), path("w_B.json")});
  EXPECT_EQ(g.out, "DUPLICATOR\n");
}

TEST_F(CliTest, SearchSeedFromEnvironment) {
  ::setenv("SEMIJOIN_LAB_SEED", "9", 1);
  CliResult env = run({"-q", "search", "--query", "cartesian"});
  ::unsetenv("SEMIJOIN_LAB_SEED");
  CliResult flag = run({"-q", "search", "--query", "cartesian", "--seed", "9"});
  EXPECT_EQ(env.code, 0);
  EXPECT_EQ(env.out, flag.out);
  ::setenv("SEMIJOIN_LAB_SEED", "nine", 1);
  EXPECT_EQ(run({"search", "--query", "cartesian"}).code, 2);
  ::unsetenv("SEMIJOIN_LAB_SEED");
}

TEST_F(CliTest, SearchExhausted) {
  CliResult r = run({"search", "--query", "transitive", "--budget", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "not found within 3 candidates\n");
}

TEST_F(CliTest, SatSearch) {
  CliResult r = run({"-q", "sat-search", "rel S", "--schema", "S/1"});
  EXPECT_EQ(r.code, 0);
  Database db = load_database(r.out);
  EXPECT_EQ(db.relation("S").size(), 1u);
  CliResult none = run({"sat-search", "diff(rel S, rel S)", "--schema", "S/1"});
  EXPECT_EQ(none.out, "none found with at most 3 values\n");
  CliResult fn = run({"-q", "sat-search", to_string(functional_violation_expr()), "--schema", "D/2"});
  EXPECT_FALSE(eval_sa(functional_violation_expr(), load_database(fn.out)).empty());
}

TEST_F(CliTest, OutputIsByteStable) {
  auto [a, b] = fig1();
  std::vector<std::vector<std::string>> commands = {
      {"game", a, b, "--report", path("r1.json"), "--strategy"},
      {"distinguish", unary("x.json", {"a"}), unary("y.json", {"a", "b"})},
      {"search", "--query", "transitive", "--seed", "4"},
      {"corpus", "emit", "--name", "ordered-transitivity", "--m", "5"},
  };
  for (const auto& c : commands) {
    CliResult first = run(c), second = run(c);
    EXPECT_EQ(first.out, second.out);
    EXPECT_EQ(first.code, second.code);
  }
}

TEST_F(CliTest, ReplHumanSpoilerOnFig1NeverWins) {
  auto [a, b] = fig1();
  std::string script = "help\nmoves\nA (a,b)\nB (h,i)\nbogus\nA (q)\nB (g,l)\nA (c)\nstate\nquit\n";
  CliResult r = run({"repl", a, b}, script);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("SPOILER wins"), std::string::npos);
  EXPECT_NE(r.out.find("illegal move"), std::string::npos);
  EXPECT_NE(r.out.find("duplicator answers (g,h)"), std::string::npos);
  EXPECT_NE(r.out.find("bye"), std::string::npos);
}

TEST_F(CliTest, ReplMachineSpoilerWinsSingletonVersusPair) {
  std::string a = unary("a.json", {"a"}), b = unary("b.json", {"a", "b"});
  // One illegal answer, then the only legal one; the spoiler then plays a
  // move with no answer.
  CliResult r = run({"repl", a, b, "--side", "duplicator"}, "(q)\n(b)\n(a)\n");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("SPOILER wins"), std::string::npos);
  EXPECT_NE(r.out.find("illegal answer"), std::string::npos);
  EXPECT_NE(r.out.find("-- round 2"), std::string::npos);
  EXPECT_EQ(r.out.find("-- round 3"), std::string::npos);
}

TEST_F(CliTest, ReplQuitAndEof) {
  auto [a, b] = fig1();
  EXPECT_EQ(run({"repl", a, b}, "quit\n").code, 0);
  EXPECT_EQ(run({"repl", a, b, "--side", "duplicator"}, "").code, 0);
  CliResult limited = run({"repl", a, b, "--max-rounds", "1"}, "A (a)\n");
  EXPECT_NE(limited.out.find("DUPLICATOR survived 1 rounds"), std::string::npos);
}

TEST(Repl, ReplayableFromSeedAndInput) {
  auto [A, B] = fig1_databases();
  Game g(A, B, Omega::equality());
  int a = g.require(Side::kA, {}), b = g.require(Side::kB, {});
  ReplOptions opt;
  opt.human_spoiler = false;
  opt.seed = 42;
  opt.max_rounds = 5;
  std::string script = "(g)\nmoves\n(h,i)\n(a)\n(d,e)\n";
  auto play = [&] {
    std::ostringstream out;
    std::istringstream in(script);
    run_repl(g, a, b, opt, in, out);
    return out.str();
  };
  EXPECT_EQ(play(), play());
}

TEST(Repl, MachineDuplicatorSurvivesRandomSpoilers) {
  auto [A, B] = fig1_databases();
  Game g(A, B, Omega::equality());
  Rng rng(8);
  std::vector<std::string> moves;
  for (Side s : {Side::kA, Side::kB})
    for (int c : g.moves(s)) moves.push_back(std::string(side_name(s)) + " " + g.db(s).format_tuple(g.positions(s)[c]));
  for (int session = 0; session < 50; ++session) {
    std::string script;
    for (int i = 0; i < 20; ++i) script += rng.pick(moves) + "\n";
    std::istringstream in(script);
    std::ostringstream out;
    ReplOptions opt;
    EXPECT_EQ(run_repl(g, g.require(Side::kA, {}), g.require(Side::kB, {}), opt, in, out), 0);
    EXPECT_EQ(out.str().find("SPOILER wins"), std::string::npos);
  }
}
