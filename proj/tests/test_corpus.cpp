#include <gtest/gtest.h>

#include <string>

#include "oracles.hpp"
#include "semijoin/semijoin.hpp"

using namespace semijoin;

namespace {

Database unary(const std::vector<std::string>& values, const std::string& name = "S") {
  std::vector<std::vector<std::string>> rows;
  for (const auto& v : values) rows.push_back({v});
  return Database(Schema{{name, 1}}, {{name, rows}});
}

}  // namespace

TEST(Fig1, TransitivityAndTupleSpaces) {
  auto [A, B] = fig1_databases();
  EXPECT_TRUE(is_transitive(A));
  EXPECT_FALSE(is_transitive(B));
  for (const Database* db : {&A, &B}) {
    TupleSet t = tuple_space(*db);
    std::size_t unary_count = 0, binary_count = 0;
    for (const Tuple& u : t) (u.size() == 1 ? unary_count : binary_count) += u.size() > 0;
    EXPECT_EQ(unary_count, 6u);
    EXPECT_EQ(binary_count, 6u);
    EXPECT_TRUE(t.contains({}));
  }
}

TEST(Fig1, StrategyTablesAreBijectionsOfTupleSpaces) {
  auto [A, B] = fig1_databases();
  for (const auto& table : {fig1_strategy_f(), fig1_strategy_g()}) {
    std::set<Tuple> left, right;
    for (const auto& [ta, tb] : table) {
      left.insert(A.parse_tuple(ta));
      right.insert(B.parse_tuple(tb));
    }
    left.insert(Tuple{});
    right.insert(Tuple{});
    EXPECT_EQ(left, oracle::rows(tuple_space(A)));
    EXPECT_EQ(right, oracle::rows(tuple_space(B)));
  }
}

TEST(OrderedTransitivity, ShapeAndTransitivity) {
  for (std::size_t m : {3u, 5u, 7u}) {
    auto [A, B] = ordered_transitivity(m);
    EXPECT_EQ(A.relation("R").size(), m * m + 2 * m);
    EXPECT_EQ(B.relation("R").size(), m * m + 2 * m - 1);
    EXPECT_TRUE(A.has_declared_order());
    EXPECT_TRUE(is_transitive(A));
    EXPECT_FALSE(is_transitive(B));
    EXPECT_EQ(oracle::transitive(A), is_transitive(A));
  }
  auto [A, B] = ordered_transitivity(3);
  auto missing = set_difference(A.relation("R"), B.relation("R"));
  ASSERT_EQ(missing.size(), 1u);
  EXPECT_EQ(A.format_tuple(missing[0]), "(2,5)");
  EXPECT_THROW(ordered_transitivity(4), CheckError);
  EXPECT_THROW(ordered_transitivity(1), CheckError);
}

TEST(AtLeast, Examples) {
  Database abc = unary({"a", "b", "c"});
  EXPECT_FALSE(eval_sa(at_least(3), abc).empty());
  EXPECT_TRUE(eval_sa(at_least(4), abc).empty());
  EXPECT_EQ(at_least(1), SAExpr::relation("S"));
  EXPECT_THROW(at_least(0), CheckError);
}

TEST(AtLeast, OrderInvariant) {
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    std::size_t n = rng.below(6);
    std::vector<std::string> vals;
    for (std::size_t j = 0; j < n; ++j) vals.push_back(value_name(j));
    Database db = unary(vals).with_order(vals);
    for (std::size_t k = 1; k <= 5; ++k) {
      bool verdict = !eval_sa(at_least(k), db).empty();
      EXPECT_EQ(verdict, n >= k);
      for (int shuffles = 0; shuffles < 3; ++shuffles) {
        auto order = vals;
        rng.shuffle(order);
        EXPECT_EQ(!eval_sa(at_least(k), db.with_order(order)).empty(), verdict);
      }
    }
  }
}

TEST(FunctionalViolation, Examples) {
  Schema s{{"D", 2}};
  Database two(s, {{"D", {{"1", "2"}, {"1", "3"}}}});
  Database fn(s, {{"D", {{"1", "2"}, {"2", "2"}}}});
  EXPECT_FALSE(eval_sa(functional_violation_expr(), two).empty());
  EXPECT_TRUE(eval_sa(functional_violation_expr(), fn).empty());
}

TEST(FunctionalViolation, MatchesPartialFunctionOracle) {
  Schema s{{"D", 2}};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Database db = random_database(s, 1 + seed % 4, 0.3, seed);
    bool empty = eval_sa(functional_violation_expr(), db).empty();
    EXPECT_EQ(empty, oracle::partial_function(db));
    EXPECT_EQ(empty, is_partial_function(db, "D"));
  }
}

TEST(DistinctPair, Examples) {
  EXPECT_TRUE(eval_sa(distinct_pair_expr(), unary({"a"})).empty());
  EXPECT_FALSE(eval_sa(distinct_pair_expr(), unary({"a", "b"})).empty());
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    std::size_t n = rng.below(5);
    std::vector<std::string> vals;
    for (std::size_t j = 0; j < n; ++j) vals.push_back(value_name(rng.below(6)));
    Database db = unary(vals);
    EXPECT_EQ(eval_sa(distinct_pair_expr(), db).empty(), db.relation("S").size() < 2);
  }
}

TEST(QueryOracles, Examples) {
  EXPECT_TRUE(is_transitive(binary_database({{"1", "2"}, {"2", "3"}, {"1", "3"}})));
  EXPECT_FALSE(is_transitive(binary_database({{"1", "2"}, {"2", "3"}})));
  EXPECT_TRUE(is_cartesian_closed(binary_database({{"1", "3"}, {"1", "4"}, {"2", "3"}, {"2", "4"}})));
  EXPECT_FALSE(is_cartesian_closed(binary_database({{"1", "3"}, {"2", "4"}})));
  EXPECT_THROW(is_transitive(unary({"a"}), "S"), CheckError);
}

TEST(QueryOracles, MatchNaiveVersions) {
  Schema s{{"R", 2}};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Database db = random_database(s, 1 + seed % 5, 0.35, seed);
    EXPECT_EQ(is_transitive(db), oracle::transitive(db));
    EXPECT_EQ(is_cartesian_closed(db), oracle::cartesian(db));
    EXPECT_EQ(is_partial_function(db), oracle::partial_function(db, "R"));
  }
}

TEST(WitnessSearch, CartesianPairIsCertified) {
  auto r = find_witness_pair([](const Database& d) { return is_cartesian_closed(d); },
                             [](const Database& d) { return is_cartesian_closed(d); });
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(oracle::cartesian(r->a));
  EXPECT_FALSE(oracle::cartesian(r->b));
  EXPECT_LE(r->a.universe().size(), 8u);
  EXPECT_LE(r->b.universe().size(), 8u);
  oracle::NaiveGame g = oracle::solve(r->a, r->b, false);
  EXPECT_TRUE(g.wins({}, {}, 100));
  EXPECT_EQ(g.rank.at({Tuple{}, Tuple{}}), -1);
}

TEST(WitnessSearch, TransitivityPairIsCertified) {
  auto r = find_witness_pair([](const Database& d) { return is_transitive(d); },
                             [](const Database& d) { return is_transitive(d); }, {8, 1, 4000});
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(oracle::transitive(r->a));
  EXPECT_FALSE(oracle::transitive(r->b));
  Game g(r->a, r->b, Omega::equality());
  EXPECT_TRUE(g.wins(g.require(Side::kA, {}), g.require(Side::kB, {})));
}

TEST(WitnessSearch, ExhaustedBudgetReturnsNothing) {
  // No database can satisfy an oracle and fail the same oracle.
  auto always = [](const Database&) { return true; };
  EXPECT_FALSE(find_witness_pair(always, always, {6, 3, 200}).has_value());
}

TEST(WitnessSearch, DeterministicPerSeed) {
  auto q = [](const Database& d) { return is_cartesian_closed(d); };
  auto r1 = find_witness_pair(q, q, {8, 7, 4000});
  auto r2 = find_witness_pair(q, q, {8, 7, 4000});
  ASSERT_TRUE(r1 && r2);
  EXPECT_EQ(dump_database(r1->a), dump_database(r2->a));
  EXPECT_EQ(dump_database(r1->b), dump_database(r2->b));
  EXPECT_EQ(r1->candidates, r2->candidates);
}

TEST(NamedInstances, AllBuildAndPassTheirChecks) {
  for (const auto& name : corpus_names()) {
    NamedInstance inst = corpus_instance(name);
    EXPECT_EQ(inst.name, name);
    EXPECT_FALSE(inst.facts.empty());
  }
  EXPECT_NO_THROW(corpus_instance("ordered-transitivity", 5));
  EXPECT_THROW(corpus_instance("nope"), CheckError);
}

TEST(SatSearch, Examples) {
  Schema s{{"S", 1}};
  auto r = sat_search(parse_sa("rel S"), s, 3);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->db.universe().size(), 1u);
  EXPECT_EQ(r->db.relation("S").size(), 1u);
  EXPECT_FALSE(sat_search(parse_sa("diff(rel S, rel S)"), s, 3).has_value());
}

TEST(SatSearch, FunctionalViolationNeedsThreeValues) {
  Schema s{{"D", 2}};
  auto r = sat_search(functional_violation_expr(), s, 3);
  ASSERT_TRUE(r.has_value());
  EXPECT_FALSE(eval_sa(functional_violation_expr(), r->db).empty());
  // With two values the smallest violation is D = {(a,a),(a,b)}.
  EXPECT_EQ(r->db.universe().size(), 2u);
  EXPECT_EQ(r->db.relation("D").size(), 2u);
}

TEST(SatSearch, MinimalByValueCount) {
  Schema s{{"S", 1}};
  auto r = sat_search(SAExpr::project({}, at_least(3)), s, 4);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->db.universe().size(), 3u);
  EXPECT_TRUE(r->db.has_declared_order());
}

TEST(SatSearch, BudgetStopsSearch) {
  Schema s{{"S", 1}};
  EXPECT_FALSE(sat_search(SAExpr::project({}, at_least(3)), s, 4, 2).has_value());
}
