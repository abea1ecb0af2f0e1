// Acceptance run: one PASS/FAIL line per criterion with its wall-clock time
// against a fixed limit.  Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "semijoin/semijoin.hpp"

using namespace semijoin;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};


Outcome fail(std::string why) { return {false, std::move(why)}; }

// 1. Transitivity split on the two-triangle pair, duplicator wins.
Outcome fig1_reproduction() {
  auto [A, B] = fig1_databases();
  bool ta = is_transitive(A), tb = is_transitive(B);
  Game g = winning_region_infinite(A, B, Omega::equality());
  bool dup = g.wins(g.require(Side::kA, {}), g.require(Side::kB, {}));
  std::ostringstream d;
  d << "transitive(A)=" << ta << " transitive(B)=" << tb << " verdict=" << (dup ? "DUPLICATOR" : "SPOILER");
  return {ta && !tb && dup, d.str()};
}

// 2. Every configuration of the two published bijections is in the fixpoint.
Outcome strategy_containment() {
  auto [A, B] = fig1_databases();
  Game g(A, B, Omega::equality());
  std::set<std::pair<std::string, std::string>> configs{{"()", "()"}};
  for (const auto& table : {fig1_strategy_f(), fig1_strategy_g()})
    for (const auto& p : table) configs.insert(p);
  std::size_t inside = 0;
  for (const auto& [ta, tb] : configs)
    if (g.wins(g.require(Side::kA, A.parse_tuple(ta)), g.require(Side::kB, B.parse_tuple(tb)))) ++inside;
  std::ostringstream d;
  d << inside << "/" << configs.size() << " configurations in the fixpoint";
  return {inside == configs.size() && configs.size() == 25, d.str()};
}

// 3. Ordered databases: the duplicator survives n = (m-1)/2 rounds.
Outcome ordered_rounds() {
  std::ostringstream d;
  bool ok = true;
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{1, 3}, {2, 5}}) {
    auto [A, B] = ordered_transitivity(m);
    bool w = wins_m(A, B, {}, {}, n, Omega::ordered());
    d << "m=" << m << " wins_" << n << "=" << w << " ";
    ok = ok && w;
  }
  return {ok, d.str()};
}

// 4. SA= to GF and back through both evaluators.
Outcome sa_to_gf_round_trip() {
  const Dialect dialect{ProjectionStyle::kSet, ConditionClass::kEqConjunctive};
  Rng rng(4);
  std::size_t mismatches = 0, tuples = 0;
  for (int i = 0; i < 200; ++i) {
    Schema s;
    std::size_t rels = 1 + rng.below(2);
    for (std::size_t r = 0; r < rels; ++r) s.add(std::string(1, static_cast<char>('R' + r)), 1 + rng.below(3));
    SAExpr e = random_expr(s, rng.below(5), dialect, rng.next(), std::nullopt, 20);
    Formula f = sa_to_gf(e, s);
    auto vars = output_vars(check_sa(e, s).arity);
    for (int k = 0; k < 3; ++k) {
      Database db = random_database(s, 1 + rng.below(5), 0.15 + 0.1 * static_cast<double>(rng.below(4)), rng.next());
      TupleSet lhs = gf_result_set(f, db, vars), rhs = eval_sa(e, db);
      tuples += rhs.size();
      if (!(lhs.tuples() == rhs.tuples())) ++mismatches;
    }
  }
  std::ostringstream d;
  d << "600 evaluations, " << tuples << " result tuples, " << mismatches << " mismatches";
  return {mismatches == 0, d.str()};
}

InjectionSpec random_spec(const Schema& s, std::size_t k, Rng& rng) {
  std::vector<std::string> candidates;
  for (const auto& [name, arity] : s.relations())
    if (arity >= k) candidates.push_back(name);
  std::string r = rng.pick(candidates);
  std::vector<std::size_t> pos(s.arity(r));
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i + 1;
  rng.shuffle(pos);
  pos.resize(k);
  return {r, pos};
}

// 5. GF to SA= against {v ∈ π_f(R) : φ(v)} from the naive evaluator.
Outcome gf_to_sa_round_trip() {
  Schema s{{"R", 2}, {"S", 1}, {"T", 3}};
  Rng rng(5);
  std::size_t mismatches = 0, tuples = 0;
  for (int i = 0; i < 200; ++i) {
    std::size_t k = rng.below(3);
    Formula phi = random_gf(s, output_vars(k), 2, rng.next());
    InjectionSpec spec = random_spec(s, k, rng);
    SAExpr e = gf_to_sa(phi, k, spec, s);
    for (int j = 0; j < 3; ++j) {
      Database db = random_database(s, 1 + rng.below(4), 0.2 + 0.1 * static_cast<double>(rng.below(3)), rng.next());
      oracle::Rows expect;
      auto answers = oracle::gf_answers(phi, db, output_vars(k));
      for (const Tuple& t : db.relation(spec.relation)) {
        Tuple v;
        for (std::size_t p : spec.f) v.push_back(t[p - 1]);
        if (answers.count(v)) expect.insert(v);
      }
      tuples += expect.size();
      if (oracle::rows(eval_sa(e, db)) != expect) ++mismatches;
    }
  }
  std::ostringstream d;
  d << "600 evaluations, " << tuples << " result tuples, " << mismatches << " mismatches";
  return {mismatches == 0, d.str()};
}

// 6. Sentences: the nullary translation is nonempty iff the sentence holds.
Outcome sentence_check() {
  Schema s{{"R", 2}, {"S", 1}};
  Rng rng(6);
  std::size_t mismatches = 0, true_count = 0, done = 0;
  while (done < 100) {
    Database db = random_database(s, 1 + rng.below(4), 0.3, rng.next());
    std::vector<std::string> nonempty;
    for (const auto& [name, r] : db.relations())
      if (!r.empty()) nonempty.push_back(name);
    if (nonempty.empty()) continue;
    Formula phi = random_gf(s, {}, 2, rng.next());
    bool truth = oracle::eval_gf(phi, db, {});
    bool nonempty_result = !eval_sa(gf_sentence_to_sa0(phi, rng.pick(nonempty), s), db).empty();
    true_count += truth;
    if (truth != nonempty_result) ++mismatches;
    ++done;
  }
  std::ostringstream d;
  d << "100 sentences (" << true_count << " true), " << mismatches << " mismatches";
  return {mismatches == 0, d.str()};
}

// 7. S={a} versus S={a,b}.
Outcome inequality_separation() {
  Schema s{{"S", 1}};
  Database A(s, {{"S", {{"a"}}}}), B(s, {{"S", {{"a"}, {"b"}}}});
  bool ea = eval_sa(distinct_pair_expr(), A).empty(), eb = eval_sa(distinct_pair_expr(), B).empty();
  Game g(A, B, Omega::equality());
  int a = g.require(Side::kA, {}), b = g.require(Side::kB, {});
  bool spoiler = !g.wins(a, b);
  auto e = distinguish(g, a, b);
  bool verified = e && !eval_sa(*e, A).empty() && eval_sa(*e, B).empty();
  // Same answers as ¬π_∅(S ⋉≠ S) on further unary databases.
  bool agrees = true;
  if (e)
    for (std::size_t n = 1; n <= 4; ++n) {
      std::vector<std::vector<std::string>> rows;
      for (std::size_t i = 0; i < n; ++i) rows.push_back({value_name(i)});
      Database d(s, {{"S", rows}});
      agrees = agrees && (eval_sa(*e, d).empty() == (n >= 2));
    }
  std::ostringstream d;
  d << "empty(A)=" << ea << " empty(B)=" << eb << " spoiler=" << spoiler << " rank=" << g.rank(a, b)
    << " verified=" << verified << " agrees-on-1..4=" << agrees;
  return {ea && !eb && spoiler && verified && agrees, d.str()};
}

// 8. Soundness: configurations won for m rounds are not separated by any
// random expression of depth at most m.
Outcome soundness_sweep() {
  Schema s{{"R", 2}, {"S", 1}};
  const Dialect eq_dialect{ProjectionStyle::kSet, ConditionClass::kQfEquality};
  const Dialect ord_dialect{ProjectionStyle::kSet, ConditionClass::kQfOmega};
  Rng rng(8);
  std::size_t violations = 0, checks = 0, configs = 0;
  for (int pair = 0; pair < 100; ++pair) {
    bool ordered = pair % 2 == 1;
    Omega om = ordered ? Omega::ordered() : Omega::equality();
    double density = 0.2 + 0.1 * static_cast<double>(rng.below(4));
    Database A = random_database(s, 1 + rng.below(4), density, rng.next(), ordered);
    Database B = random_database(s, 1 + rng.below(4), density, rng.next(), ordered);
    Game g(A, B, om);
    for (std::size_t m = 0; m <= 3; ++m) {
      std::vector<std::pair<int, int>> won;
      for (int a = 0; a < static_cast<int>(g.size(Side::kA)); ++a)
        for (int b = 0; b < static_cast<int>(g.size(Side::kB)); ++b)
          if (g.wins(a, b, m)) won.emplace_back(a, b);
      configs += won.size();
      for (std::size_t k = 0; k <= 2; ++k) {
        bool any = std::any_of(won.begin(), won.end(), [&](auto p) { return g.positions(Side::kA)[p.first].size() == k; });
        if (!any) continue;
        const Dialect& dialect = ordered ? ord_dialect : eq_dialect;
        try {
          random_expr(s, m, dialect, 0, k, 1);
        } catch (const CheckError&) {
          continue;  // no expression of arity k has depth m or less
        }
        for (int x = 0; x < 100; ++x) {
          SAExpr e = random_expr(s, m, dialect, rng.next(), k, 16);
          TupleSet ea = eval_sa(e, A), eb = eval_sa(e, B);
          for (auto [a, b] : won) {
            const Tuple& ta = g.positions(Side::kA)[a];
            if (ta.size() != k) continue;
            ++checks;
            if (ea.contains(ta) != eb.contains(g.positions(Side::kB)[b])) ++violations;
          }
        }
      }
    }
  }
  std::ostringstream d;
  d << checks << " membership checks over " << configs << " won configurations, " << violations << " violations";
  return {violations == 0, d.str()};
}

// 9. Synthesis on random pairs whose start configuration has rank 1 or 2.
Outcome synthesis() {
  Schema s{{"R", 2}, {"S", 1}};
  Rng rng(9);
  std::size_t pairs = 0, failures = 0, expressions = 0, tried = 0;
  std::size_t by_rank[3] = {0, 0, 0};
  while (pairs < 50 && tried < 200000) {
    ++tried;
    Database A = random_database(s, 1 + rng.below(4), 0.3, rng.next());
    Database B = random_database(s, 1 + rng.below(4), 0.3, rng.next());
    Game g(A, B, Omega::equality());
    int a0 = g.require(Side::kA, {}), b0 = g.require(Side::kB, {});
    int r0 = g.rank(a0, b0);
    if (r0 < 1 || r0 > 2 || !g.is_move(Side::kA, a0)) continue;
    ++pairs;
    std::vector<std::pair<int, int>> targets{{a0, b0}};
    for (auto [a, b, r] : g.eliminated())
      if (r >= 0 && r <= 2 && g.is_move(Side::kA, a) && (a != a0 || b != b0) && targets.size() < 6 && rng.chance(0.2))
        targets.emplace_back(a, b);
    for (auto [a, b] : targets) {
      ++expressions;
      ++by_rank[g.rank(a, b)];
      try {
        auto e = distinguish(g, a, b);
        if (!e || !eval_sa(*e, A).contains(g.positions(Side::kA)[a]) ||
            eval_sa(*e, B).contains(g.positions(Side::kB)[b]))
          ++failures;
      } catch (const Error&) {
        ++failures;
      }
    }
  }
  std::ostringstream d;
  d << pairs << " pairs, " << expressions << " expressions (rank 0/1/2: " << by_rank[0] << "/" << by_rank[1] << "/"
    << by_rank[2] << "), " << failures << " failures";
  return {pairs == 50 && failures == 0, d.str()};
}

// 10. E_a^0 and E_a^1 exactness over every database with one binary
// relation on at most three values, up to isomorphism.
Outcome exactness_exhaustive() {
  // Canonical representatives: a 3×3 adjacency bit mask, minimal over the six
  // permutations of the three values.
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<Database> dbs;
  for (int mask = 0; mask < 512; ++mask) {
    int best = mask;
    for (const auto& p : perms) {
      int m = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (mask & (1 << (3 * i + j))) m |= 1 << (3 * p[i] + p[j]);
      best = std::min(best, m);
    }
    if (best != mask) continue;
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (mask & (1 << (3 * i + j))) edges.emplace_back(value_name(i), value_name(j));
    dbs.push_back(binary_database(edges));
  }
  std::size_t violations = 0, checks = 0;
  ColorRefiner refiner(Omega::equality());
  std::vector<ColorRefiner::Coloring> colours;
  for (const auto& db : dbs) colours.push_back(refiner.refine(db, 1));
  // Round-0 colours separately: refine(db, 1) holds the round-1 colour only.
  std::vector<ColorRefiner::Coloring> colours0;
  for (const auto& db : dbs) colours0.push_back(refiner.refine(db, 0));
  for (std::size_t i = 0; i < dbs.size(); ++i) {
    const Database& A = dbs[i];
    Synthesizer synth(A, Omega::equality());
    std::vector<std::pair<SAExpr, SAExpr>> exprs;
    for (const Tuple& a : synth.tuple_space()) exprs.emplace_back(synth.e0(a), synth.er(a, 1));
    for (std::size_t j = 0; j < dbs.size(); ++j) {
      const Database& B = dbs[j];
      Game g(A, B, Omega::equality());
      SAEvaluator ev(B);
      for (std::size_t x = 0; x < synth.tuple_space().size(); ++x) {
        const Tuple& a = synth.tuple_space()[x];
        int ia = g.require(Side::kA, a);
        const TupleSet& e0 = ev.eval(exprs[x].first);
        const TupleSet& e1 = ev.eval(exprs[x].second);
        for (int ib = 0; ib < static_cast<int>(g.size(Side::kB)); ++ib) {
          const Tuple& b = g.positions(Side::kB)[ib];
          bool w0 = g.wins_round0(ia, ib), w1 = g.wins(ia, ib, 1);
          // The solver is itself cross-checked against colour refinement.
          bool c0 = colours0[i].color_of(a) == colours0[j].color_of(b);
          bool c1 = colours[i].color_of(a) == colours[j].color_of(b);
          checks += 2;
          if (e0.contains(b) != w0 || w0 != c0) ++violations;
          if (e1.contains(b) != w1 || w1 != c1) ++violations;
        }
      }
    }
  }
  std::ostringstream d;
  d << dbs.size() << " databases up to isomorphism, " << checks << " checks, " << violations << " violations";
  return {violations == 0 && dbs.size() == 104, d.str()};
}

// 11. at_least(k) on ordered unary databases, invariant under re-ordering.
Outcome at_least_invariance() {
  Schema s{{"S", 1}};
  Rng rng(11);
  std::size_t violations = 0, checks = 0;
  for (int i = 0; i < 50; ++i) {
    std::size_t universe = 1 + rng.below(7);
    std::vector<std::string> values;
    for (std::size_t v = 0; v < universe; ++v) values.push_back(value_name(v));
    std::vector<std::vector<std::string>> rows;
    for (const auto& v : values)
      if (rng.chance(0.6)) rows.push_back({v});
    std::vector<std::string> order = values;
    rng.shuffle(order);
    Database db(s, {{"S", rows}}, order);
    std::size_t k = 1 + rng.below(5);
    bool verdict = !eval_sa(at_least(k), db).empty();
    ++checks;
    if (verdict != (rows.size() >= k)) ++violations;
    for (int r = 0; r < 5; ++r) {
      rng.shuffle(order);
      ++checks;
      if (!eval_sa(at_least(k), db.with_order(order)).empty() != verdict) ++violations;
    }
  }
  std::ostringstream d;
  d << checks << " verdicts, " << violations << " violations";
  return {violations == 0, d.str()};
}

// 12. functional[D] against the partial-function oracle.
Outcome functional_check() {
  Schema s{{"D", 2}};
  Rng rng(12);
  std::size_t violations = 0, functional = 0;
  for (int i = 0; i < 100; ++i) {
    Database db = random_database(s, 1 + rng.below(5), 0.1 + 0.1 * static_cast<double>(rng.below(4)), rng.next());
    bool oracle_says = oracle::partial_function(db, "D");
    functional += oracle_says;
    if (eval_sa(functional_violation_expr(), db).empty() != oracle_says) ++violations;
  }
  std::ostringstream d;
  d << "100 relations (" << functional << " functional), " << violations << " violations";
  return {violations == 0, d.str()};
}

// 13. A certified game-equivalent pair splitting the cartesian query.
Outcome cartesian_witness() {
  auto q = [](const Database& d) { return is_cartesian_closed(d); };
  auto r = find_witness_pair(q, q, {8, 1, 4000});
  if (!r) return fail("no pair within the budget");
  bool split = oracle::cartesian(r->a) && !oracle::cartesian(r->b);
  bool small = r->a.universe().size() <= 8 && r->b.universe().size() <= 8;
  // Certify with the naive solver as well.
  oracle::NaiveGame naive = oracle::solve(r->a, r->b, false);
  bool dup = naive.rank.at({Tuple{}, Tuple{}}) < 0;
  std::ostringstream d;
  d << "|adom A|=" << r->a.universe().size() << " |adom B|=" << r->b.universe().size() << " |R_A|="
    << r->a.relation("R").size() << " |R_B|=" << r->b.relation("R").size() << " split=" << split
    << " duplicator=" << dup << " after " << r->candidates << " candidates";
  return {split && small && dup, d.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "two-triangle transitivity pair", 5, fig1_reproduction},
      {2, "bijection configurations in fixpoint", 5, strategy_containment},
      {3, "ordered databases survive n rounds", 60, ordered_rounds},
      {4, "SA= to GF round trip", 120, sa_to_gf_round_trip},
      {5, "GF to SA= round trip", 120, gf_to_sa_round_trip},
      {6, "GF sentences to nullary SA=", 120, sentence_check},
      {7, "inequality separation", 5, inequality_separation},
      {8, "soundness sweep", 600, soundness_sweep},
      {9, "distinguishing expression synthesis", 600, synthesis},
      {10, "E^0 / E^1 exactness, exhaustive", 600, exactness_exhaustive},
      {11, "at_least order invariance", 60, at_least_invariance},
      {12, "functional dependency check", 60, functional_check},
      {13, "cartesian witness pair", 600, cartesian_witness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs <= c.limit_seconds;
    bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << "criterion " << std::setw(2) << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << std::fixed
              << std::setprecision(2) << secs << "s (limit " << std::setprecision(0) << c.limit_seconds << "s)  "
              << c.name << ": " << o.detail << (in_time ? "" : " [time limit exceeded]") << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
