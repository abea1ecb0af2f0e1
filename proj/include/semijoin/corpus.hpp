#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semijoin/condition.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"
#include "semijoin/game.hpp"
#include "semijoin/random.hpp"
#include "semijoin/refine.hpp"
#include "semijoin/sa.hpp"

namespace semijoin {

using DatabasePair = std::pair<Database, Database>;

// ---------------------------------------------------------------------------
// Query oracles on a binary relation.

inline const TupleSet& binary_relation(const Database& db, const std::string& r) {
  if (db.schema().arity(r) != 2) throw CheckError("relation '" + r + "' is not binary");
  return db.relation(r);
}

inline bool is_transitive(const Database& db, const std::string& r = "R") {
  const TupleSet& rel = binary_relation(db, r);
  for (const Tuple& s : rel)
    for (const Tuple& t : rel)
      if (s[1] == t[0] && !rel.contains({s[0], t[1]})) return false;
  return true;
}

// R = π1(R) × π2(R).
inline bool is_cartesian_closed(const Database& db, const std::string& r = "R") {
  const TupleSet& rel = binary_relation(db, r);
  for (const Tuple& s : rel)
    for (const Tuple& t : rel)
      if (!rel.contains({s[0], t[1]})) return false;
  return true;
}

inline bool is_partial_function(const Database& db, const std::string& r = "R") {
  const TupleSet& rel = binary_relation(db, r);
  for (const Tuple& s : rel)
    for (const Tuple& t : rel)
      if (s[0] == t[0] && s[1] != t[1]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Expressions.

// at_least(1) = S, at_least(k) = S ⋉_{x1<y1} at_least(k-1).
inline SAExpr at_least(std::size_t k, const std::string& s = "S") {
  if (k == 0) throw CheckError("at_least needs k >= 1");
  SAExpr e = SAExpr::relation(s);
  Condition lt = Condition::atom(Position::x(1), CompareOp::kLt, Position::y(1));
  for (std::size_t i = 1; i < k; ++i) e = SAExpr::semijoin(lt, SAExpr::relation(s), e);
  return e;
}

// D ⋉_{x1=y1 ∧ x2≠y2} D: empty iff D is the graph of a partial function.
inline SAExpr functional_violation_expr(const std::string& d = "D") {
  return SAExpr::semijoin(Condition::conj({Condition::atom(Position::x(1), CompareOp::kEq, Position::y(1)),
                                           Condition::atom(Position::x(2), CompareOp::kNe, Position::y(2))}),
                          SAExpr::relation(d), SAExpr::relation(d));
}

// S ⋉_{x1≠y1} S: nonempty iff |S| >= 2.
inline SAExpr distinct_pair_expr(const std::string& s = "S") {
  return SAExpr::semijoin(Condition::atom(Position::x(1), CompareOp::kNe, Position::y(1)), SAExpr::relation(s),
                          SAExpr::relation(s));
}

// ---------------------------------------------------------------------------
// Databases.

inline Database binary_database(const std::vector<std::pair<std::string, std::string>>& edges,
                                const std::string& r = "R") {
  TextRelations rels;
  auto& rows = rels[r];
  for (const auto& [u, v] : edges) rows.push_back({u, v});
  return Database(Schema{{r, 2}}, rels);
}

// Two disjoint transitive triangles against the twisted double cover of a
// triangle, which is not transitive.
inline DatabasePair fig1_databases() {
  return {binary_database({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"d", "e"}, {"e", "f"}, {"d", "f"}}),
          binary_database({{"g", "h"}, {"h", "i"}, {"j", "k"}, {"k", "l"}, {"g", "l"}, {"j", "i"}})};
}

// The two tuple-space bijections from A to B under which the duplicator
// answers on the two-triangle pair, as text tuples.
inline std::vector<std::pair<std::string, std::string>> fig1_strategy_f() {
  return {{"(a)", "(g)"},     {"(b)", "(h)"},     {"(c)", "(i)"},     {"(d)", "(j)"},
          {"(e)", "(k)"},     {"(f)", "(l)"},     {"(a,b)", "(g,h)"}, {"(b,c)", "(h,i)"},
          {"(d,e)", "(j,k)"}, {"(e,f)", "(k,l)"}, {"(a,c)", "(g,l)"}, {"(d,f)", "(j,i)"}};
}
inline std::vector<std::pair<std::string, std::string>> fig1_strategy_g() {
  return {{"(a)", "(j)"},     {"(b)", "(k)"},     {"(c)", "(l)"},     {"(d)", "(g)"},
          {"(e)", "(h)"},     {"(f)", "(i)"},     {"(a,b)", "(j,k)"}, {"(b,c)", "(k,l)"},
          {"(d,e)", "(g,h)"}, {"(e,f)", "(h,i)"}, {"(a,c)", "(j,i)"}, {"(d,f)", "(g,l)"}};
}

// A(R) = ({1..m}×{2m+1}) ∪ ({2m+1}×{m+1..2m}) ∪ ({1..m}×{m+1..2m}) and B(R) =
// A(R) minus ((m+1)/2, m+(m+1)/2), over zero-padded values in their natural
// declared order.
inline DatabasePair ordered_transitivity(std::size_t m) {
  if (m < 3 || m % 2 == 0) throw CheckError("ordered_transitivity needs an odd m >= 3");
  std::size_t top = 2 * m + 1, width = std::to_string(top).size();
  auto name = [&](std::size_t v) {
    std::string s = std::to_string(v);
    return std::string(width - s.size(), '0') + s;
  };
  std::vector<std::string> order;
  for (std::size_t v = 1; v <= top; ++v) order.push_back(name(v));
  std::vector<std::vector<std::string>> a;
  for (std::size_t i = 1; i <= m; ++i) a.push_back({name(i), name(top)});
  for (std::size_t j = m + 1; j <= 2 * m; ++j) a.push_back({name(top), name(j)});
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = m + 1; j <= 2 * m; ++j) a.push_back({name(i), name(j)});
  std::vector<std::string> removed{name((m + 1) / 2), name(m + (m + 1) / 2)};
  std::vector<std::vector<std::string>> b;
  for (const auto& t : a)
    if (t != removed) b.push_back(t);
  Schema schema{{"R", 2}};
  return {Database(schema, {{"R", a}}, order), Database(schema, {{"R", b}}, order)};
}

// ---------------------------------------------------------------------------
// Witness search.

using QueryOracle = std::function<bool(const Database&)>;

struct WitnessOptions {
  std::size_t max_values = 8;
  std::uint64_t seed = 1;
  std::size_t budget = 4000;  // candidate databases generated
};

struct WitnessResult {
  Database a, b;
  std::size_t candidates = 0;  // candidates generated before success
};

namespace detail {

// Candidate databases over one binary relation R, cycling through families
// that tend to contain game-equivalent pairs with different query answers.
class CandidateGenerator {
 public:
  CandidateGenerator(std::size_t max_values, std::uint64_t seed) : max_(std::max<std::size_t>(max_values, 2)), rng_(seed) {}

  Database next(std::size_t i) {
    switch (i % 5) {
      case 0: return random_relation();
      case 1: return product();
      case 2: return circulant();
      case 3: return lift();
      default: return closure();
    }
  }

 private:
  using Edges = std::set<std::pair<std::size_t, std::size_t>>;

  static Database make(const Edges& edges) {
    std::vector<std::pair<std::string, std::string>> named;
    for (auto [u, v] : edges) named.emplace_back(value_name(u), value_name(v));
    return binary_database(named);
  }

  Edges random_edges(std::size_t n) {
    double density = 0.15 + 0.1 * static_cast<double>(rng_.below(5));
    Edges e;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (rng_.chance(density)) e.emplace(u, v);
    if (e.empty()) e.emplace(rng_.below(n), rng_.below(n));
    return e;
  }

  Database random_relation() { return make(random_edges(rng_.between(2, max_))); }

  Database product() {
    std::size_t n = rng_.between(2, max_);
    std::vector<std::size_t> p, q;
    for (std::size_t v = 0; v < n; ++v) {
      if (rng_.chance(0.5)) p.push_back(v);
      if (rng_.chance(0.5)) q.push_back(v);
    }
    if (p.empty()) p.push_back(0);
    if (q.empty()) q.push_back(n - 1);
    Edges e;
    for (auto u : p)
      for (auto v : q) e.emplace(u, v);
    return make(e);
  }

  // Union of d cyclic matchings between two disjoint p-element sides, i.e. a
  // d-regular bipartite graph.
  Database circulant() {
    std::size_t p = rng_.between(1, max_ / 2);
    std::vector<std::size_t> shifts(p);
    for (std::size_t s = 0; s < p; ++s) shifts[s] = s;
    rng_.shuffle(shifts);
    shifts.resize(rng_.between(1, p));
    Edges e;
    for (std::size_t i = 0; i < p; ++i)
      for (auto s : shifts) e.emplace(i, p + (i + s) % p);
    return make(e);
  }

  // Double cover of a random digraph; each edge is kept straight or crossed.
  Database lift() {
    std::size_t n = rng_.between(2, max_ / 2);
    Edges base = random_edges(n), e;
    bool twist = rng_.chance(0.5);
    for (auto [u, v] : base) {
      bool cross = twist && rng_.chance(0.5);
      e.emplace(u, cross ? v + n : v);
      e.emplace(u + n, cross ? v : v + n);
    }
    return make(e);
  }

  Database closure() {
    std::size_t n = rng_.between(2, max_);
    Edges e = random_edges(n);
    for (bool grew = true; grew;) {
      grew = false;
      Edges add;
      for (auto [u, v] : e)
        for (auto [w, x] : e)
          if (v == w && !e.count({u, x})) add.emplace(u, x);
      if (!add.empty()) {
        grew = true;
        e.insert(add.begin(), add.end());
      }
    }
    return make(e);
  }

  std::size_t max_;
  Rng rng_;
};

inline bool certified(const Database& a, const Database& b, const QueryOracle& oa, const QueryOracle& ob) {
  if (!oa(a) || ob(b)) return false;
  Game g(a, b, Omega::equality());
  return g.wins(g.require(Side::kA, {}), g.require(Side::kB, {}));
}

}  // namespace detail

// Searches for databases A, B over one binary relation R, each with at most
// max_values values, such that oracle_a(A) holds, oracle_b(B) fails, and the
// duplicator wins the unbounded game from (⟨⟩,⟨⟩) over Ω={=}.  Candidates are
// bucketed by the round-3 colour of ⟨⟩ and only same-bucket pairs are
// solved exactly; the first success in generation order is re-certified and
// returned.
inline std::optional<WitnessResult> find_witness_pair(const QueryOracle& oracle_a, const QueryOracle& oracle_b,
                                                      const WitnessOptions& opt = {}) {
  detail::CandidateGenerator gen(opt.max_values, opt.seed);
  ColorRefiner refiner(Omega::equality());
  std::vector<Database> pool;
  std::map<int, std::vector<std::size_t>> as, bs;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < opt.budget; ++i) {
    Database db = gen.next(i);
    if (!seen.insert(dump_database(db)).second) continue;
    bool oa = oracle_a(db), ob = oracle_b(db);
    if (!oa && ob) continue;
    int color = refiner.refine(db, 3).color_of({});
    std::optional<std::pair<std::size_t, std::size_t>> hit;
    pool.push_back(std::move(db));
    std::size_t me = pool.size() - 1;
    if (oa && !ob) hit = std::make_pair(me, me);
    if (!hit && oa)
      for (std::size_t j : bs[color])
        if (detail::certified(pool[me], pool[j], oracle_a, oracle_b)) {
          hit = std::make_pair(me, j);
          break;
        }
    if (!hit && !ob)
      for (std::size_t j : as[color])
        if (detail::certified(pool[j], pool[me], oracle_a, oracle_b)) {
          hit = std::make_pair(j, me);
          break;
        }
    if (hit) {
      if (!detail::certified(pool[hit->first], pool[hit->second], oracle_a, oracle_b))
        throw InternalError("witness pair failed re-certification");
      return WitnessResult{pool[hit->first], pool[hit->second], i + 1};
    }
    if (oa) as[color].push_back(me);
    if (!ob) bs[color].push_back(me);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Named instances.

struct NamedInstance {
  std::string name;
  std::string description;
  Database a, b;
  std::map<std::string, bool> facts;  // re-checked when the instance is built
};

inline std::vector<std::string> corpus_names() {
  return {"fig1", "ordered-transitivity", "distinct-pair", "cartesian"};
}

namespace detail {

inline bool duplicator_wins_empty(const Database& a, const Database& b, Omega omega,
                                  std::optional<std::size_t> rounds = std::nullopt) {
  Game g(a, b, omega);
  return g.wins(g.require(Side::kA, {}), g.require(Side::kB, {}), rounds);
}

inline void check_facts(const NamedInstance& inst, const std::map<std::string, bool>& computed) {
  for (const auto& [k, v] : inst.facts) {
    auto it = computed.find(k);
    if (it == computed.end() || it->second != v)
      throw InternalError("corpus instance '" + inst.name + "' fails its check '" + k + "'");
  }
}

}  // namespace detail

// Builds a named instance and verifies its recorded facts.  `m` applies to
// ordered-transitivity only.
inline NamedInstance corpus_instance(const std::string& name, std::size_t m = 3) {
  NamedInstance inst;
  inst.name = name;
  std::map<std::string, bool> computed;
  if (name == "fig1") {
    inst.description = "transitive A versus non-transitive B, equivalent in the unbounded game";
    std::tie(inst.a, inst.b) = fig1_databases();
    inst.facts = {{"transitive(A)", true}, {"transitive(B)", false}, {"duplicator wins", true}};
    computed = {{"transitive(A)", is_transitive(inst.a)},
                {"transitive(B)", is_transitive(inst.b)},
                {"duplicator wins", detail::duplicator_wins_empty(inst.a, inst.b, Omega::equality())}};
  } else if (name == "ordered-transitivity") {
    inst.description = "ordered databases, transitive A versus B missing one tuple";
    std::tie(inst.a, inst.b) = ordered_transitivity(m);
    std::size_t n = (m - 1) / 2;
    std::string win = "duplicator wins " + std::to_string(n) + " rounds";
    inst.facts = {{"transitive(A)", true}, {"transitive(B)", false}};
    computed = {{"transitive(A)", is_transitive(inst.a)}, {"transitive(B)", is_transitive(inst.b)}};
    if (m <= 5) {
      inst.facts[win] = true;
      computed[win] = detail::duplicator_wins_empty(inst.a, inst.b, Omega::ordered(), n);
    }
  } else if (name == "distinct-pair") {
    inst.description = "S={a} versus S={a,b}, separated by a semijoin with x1!=y1";
    Schema s{{"S", 1}};
    inst.a = Database(s, {{"S", {{"a"}}}});
    inst.b = Database(s, {{"S", {{"a"}, {"b"}}}});
    inst.facts = {{"distinct pair in A", false}, {"distinct pair in B", true}, {"duplicator wins", false}};
    computed = {{"distinct pair in A", !eval_sa(distinct_pair_expr(), inst.a).empty()},
                {"distinct pair in B", !eval_sa(distinct_pair_expr(), inst.b).empty()},
                {"duplicator wins", detail::duplicator_wins_empty(inst.a, inst.b, Omega::equality())}};
  } else if (name == "cartesian") {
    inst.description = "R = K(2,2), a product, versus a 6-cycle, which is not";
    inst.a = binary_database({{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}});
    inst.b = binary_database({{"a", "d"}, {"a", "e"}, {"b", "e"}, {"b", "f"}, {"c", "f"}, {"c", "d"}});
    inst.facts = {{"cartesian(A)", true}, {"cartesian(B)", false}, {"duplicator wins", true}};
    computed = {{"cartesian(A)", is_cartesian_closed(inst.a)},
                {"cartesian(B)", is_cartesian_closed(inst.b)},
                {"duplicator wins", detail::duplicator_wins_empty(inst.a, inst.b, Omega::equality())}};
  } else {
    throw CheckError("unknown corpus instance '" + name + "'");
  }
  detail::check_facts(inst, computed);
  return inst;
}

}  // namespace semijoin
