#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "semijoin/condition.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"
#include "semijoin/gf.hpp"
#include "semijoin/sa.hpp"

namespace semijoin {

// Seeded generator with a portable draw (mt19937_64 is fully specified; the
// standard distributions are not, so they are avoided to keep output stable
// across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n); n > 0.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }
  std::uint64_t next() { return engine_(); }

  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Value names a, b, ..., z, then v26, v27, ...
inline std::string value_name(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('a' + i));
  return "v" + std::to_string(i);
}

// Each relation receives each possible tuple over `num_values` values with
// probability `density`; nullary relations are nonempty with probability 1/2.
// With `ordered`, the universe a < b < ... is declared.
inline Database random_database(const Schema& schema, std::size_t num_values, double density,
                                std::uint64_t seed, bool ordered = false) {
  Rng rng(seed);
  std::vector<std::string> values;
  for (std::size_t i = 0; i < num_values; ++i) values.push_back(value_name(i));
  TextRelations rels;
  for (const auto& [name, arity] : schema.relations()) {
    auto& rows = rels[name];
    if (arity == 0) {
      if (rng.chance(0.5)) rows.emplace_back();
      continue;
    }
    if (num_values == 0) continue;
    std::vector<std::size_t> idx(arity, 0);
    while (true) {
      if (rng.chance(density)) {
        std::vector<std::string> row;
        for (std::size_t i : idx) row.push_back(values[i]);
        rows.push_back(std::move(row));
      }
      std::size_t p = arity;
      while (p > 0 && ++idx[p - 1] == num_values) idx[--p] = 0;
      if (p == 0) break;
    }
  }
  if (ordered) return Database(schema, rels, values);
  return Database(schema, rels);
}

namespace detail {

class SAGenerator {
 public:
  SAGenerator(const Schema& s, Dialect d, std::uint64_t seed) : schema_(s), dialect_(d), rng_(seed) {
    for (const auto& [name, arity] : s.relations()) {
      by_arity_.resize(std::max(by_arity_.size(), arity + 1));
      by_arity_[arity].push_back(name);
    }
  }

  bool feasible(std::size_t k, std::size_t depth) const {
    if (k < by_arity_.size() && !by_arity_[k].empty()) return true;
    return depth >= 1 && schema_.max_arity() >= k;
  }

  SAExpr gen(std::size_t k, std::size_t depth, int fuel) {
    bool has_rel = k < by_arity_.size() && !by_arity_[k].empty();
    if (fuel <= 1 || rng_.chance(0.2)) {
      if (has_rel) return SAExpr::relation(rng_.pick(by_arity_[k]));
      return projection(k, depth, 1);
    }
    std::vector<int> ops;  // 0 rel, 1 union, 2 diff, 3 select, 4 project, 5 semijoin
    if (has_rel) ops.push_back(0);
    ops.push_back(1);
    ops.push_back(2);
    if (k > 0) ops.push_back(3);
    if (depth >= 1) {
      ops.push_back(4);
      // The left operand keeps arity k one level down.
      if (feasible(k, depth - 1)) {
        ops.push_back(5);
        ops.push_back(5);
      }
    }
    switch (rng_.pick(ops)) {
      case 0: return SAExpr::relation(rng_.pick(by_arity_[k]));
      case 1: return SAExpr::union_of(gen(k, depth, fuel / 2), gen(k, depth, fuel / 2));
      case 2: return SAExpr::difference(gen(k, depth, fuel / 2), gen(k, depth, fuel / 2));
      case 3: return SAExpr::select(selection_condition(k), gen(k, depth, fuel - 1));
      case 4: return projection(k, depth, fuel - 1);
      default: {
        std::vector<std::size_t> rights;
        for (std::size_t m = 0; m <= schema_.max_arity(); ++m)
          if (feasible(m, depth - 1)) rights.push_back(m);
        std::size_t m = rng_.pick(rights);
        Condition c = semijoin_condition(k, m);
        SAExpr left = gen(k, depth - 1, fuel / 2);
        return SAExpr::semijoin(c, left, gen(m, depth - 1, fuel / 2));
      }
    }
  }

 private:
  SAExpr projection(std::size_t k, std::size_t depth, int fuel) {
    std::vector<std::size_t> sources;
    for (std::size_t n = k; n <= schema_.max_arity(); ++n)
      if (feasible(n, depth - 1)) sources.push_back(n);
    std::size_t n = rng_.pick(sources);
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i + 1;
    rng_.shuffle(all);
    all.resize(k);
    if (dialect_.projection == ProjectionStyle::kSet) std::sort(all.begin(), all.end());
    return SAExpr::project(all, gen(n, depth - 1, fuel));
  }

  CompareOp random_op(bool allow_ne) {
    std::vector<CompareOp> ops{CompareOp::kEq};
    if (allow_ne) ops.push_back(CompareOp::kNe);
    if (dialect_.conditions == ConditionClass::kQfOmega) {
      ops.push_back(CompareOp::kLt);
      ops.push_back(CompareOp::kLe);
    }
    return rng_.pick(ops);
  }

  Condition random_formula(const std::vector<Position>& positions, int depth) {
    if (depth == 0 || rng_.chance(0.5)) {
      if (rng_.chance(0.05)) return Condition::truth(rng_.chance(0.5));
      return Condition::atom(rng_.pick(positions), random_op(true), rng_.pick(positions));
    }
    switch (rng_.below(3)) {
      case 0: return Condition::negate(random_formula(positions, depth - 1));
      case 1:
        return Condition::conj({random_formula(positions, depth - 1), random_formula(positions, depth - 1)});
      default:
        return Condition::disj({random_formula(positions, depth - 1), random_formula(positions, depth - 1)});
    }
  }

  // Any quantifier-free formula over the left positions (order atoms only in
  // the qf-omega dialect).
  Condition selection_condition(std::size_t k) {
    std::vector<Position> ps;
    for (std::size_t i = 1; i <= k; ++i) ps.push_back(Position::x(i));
    return random_formula(ps, 2);
  }

  Condition semijoin_condition(std::size_t n, std::size_t m) {
    if (dialect_.conditions == ConditionClass::kEqConjunctive || rng_.chance(0.3)) {
      std::vector<Condition> atoms;
      if (n > 0 && m > 0) {
        std::size_t count = rng_.below(3);
        for (std::size_t i = 0; i < count; ++i)
          atoms.push_back(Condition::atom(Position::x(rng_.between(1, n)), CompareOp::kEq,
                                          Position::y(rng_.between(1, m))));
      }
      return Condition::conj(std::move(atoms));
    }
    std::vector<Position> ps;
    for (std::size_t i = 1; i <= n; ++i) ps.push_back(Position::x(i));
    for (std::size_t j = 1; j <= m; ++j) ps.push_back(Position::y(j));
    if (ps.empty()) return Condition::truth(true);
    return random_formula(ps, 2);
  }

  const Schema& schema_;
  Dialect dialect_;
  Rng rng_;
  std::vector<std::vector<std::string>> by_arity_;
};

}  // namespace detail

// Random well-formed expression within `dialect` with nesting depth at most
// `max_depth`.  The arity is `arity` when given (throws CheckError when no
// expression of that arity exists), else a random feasible one.
inline SAExpr random_expr(const Schema& schema, std::size_t max_depth, Dialect dialect, std::uint64_t seed,
                          std::optional<std::size_t> arity = std::nullopt, int size = 24) {
  if (schema.relations().empty()) throw CheckError("random_expr needs a nonempty schema");
  detail::SAGenerator g(schema, dialect, seed);
  std::size_t k;
  if (arity) {
    k = *arity;
    if (!g.feasible(k, max_depth))
      throw CheckError("no expression of arity " + std::to_string(k) + " at depth " + std::to_string(max_depth));
  } else {
    std::vector<std::size_t> ks;
    for (std::size_t a = 0; a <= schema.max_arity(); ++a)
      if (g.feasible(a, max_depth)) ks.push_back(a);
    k = Rng(seed ^ 0x5a5a5a5aULL).pick(ks);
  }
  return g.gen(k, max_depth, size);
}

namespace detail {

class GFGenerator {
 public:
  GFGenerator(const Schema& s, std::uint64_t seed) : schema_(s), rng_(seed) {
    for (const auto& [name, arity] : s.relations()) rels_.emplace_back(name, arity);
  }

  Formula gen(const std::vector<std::string>& scope, std::size_t qdepth, int fuel) {
    if (fuel <= 1 || rng_.chance(0.25)) return atomic(scope);
    std::vector<int> ops{0, 1, 2, 3, 4, 5};
    if (qdepth > 0) {
      ops.push_back(6);
      ops.push_back(6);
    }
    switch (rng_.pick(ops)) {
      case 0: return atomic(scope);
      case 1: return Formula::negate(gen(scope, qdepth, fuel - 1));
      case 2: return Formula::conj(gen(scope, qdepth, fuel / 2), gen(scope, qdepth, fuel / 2));
      case 3: return Formula::disj(gen(scope, qdepth, fuel / 2), gen(scope, qdepth, fuel / 2));
      case 4: return Formula::implies(gen(scope, qdepth, fuel / 2), gen(scope, qdepth, fuel / 2));
      case 5: return Formula::iff(gen(scope, qdepth, fuel / 3), gen(scope, qdepth, fuel / 3));
      default: return quantifier(scope, qdepth, fuel - 1);
    }
  }

 private:
  Formula atomic(const std::vector<std::string>& scope) {
    std::vector<std::pair<std::string, std::size_t>> usable;
    for (const auto& r : rels_)
      if (r.second == 0 || !scope.empty()) usable.push_back(r);
    bool eq_ok = !scope.empty();
    if (usable.empty() && !eq_ok) return Formula::truth(rng_.chance(0.5));
    if (rng_.chance(0.05)) return Formula::truth(rng_.chance(0.5));
    if (eq_ok && (usable.empty() || rng_.chance(0.3))) return Formula::eq(rng_.pick(scope), rng_.pick(scope));
    const auto& [name, arity] = rng_.pick(usable);
    std::vector<std::string> args;
    for (std::size_t i = 0; i < arity; ++i) args.push_back(rng_.pick(scope));
    return Formula::rel(name, args);
  }

  Formula quantifier(const std::vector<std::string>& scope, std::size_t qdepth, int fuel) {
    std::vector<std::pair<std::string, std::size_t>> guards;
    for (const auto& r : rels_)
      if (r.second > 0) guards.push_back(r);
    if (guards.empty()) return atomic(scope);
    const auto& [name, arity] = rng_.pick(guards);
    // Bound names are fresh per depth, or occasionally shadow a scope variable.
    std::vector<std::string> fresh;
    std::size_t nb = rng_.between(1, std::min<std::size_t>(arity, 2));
    for (std::size_t i = 0; i < nb; ++i) {
      if (!scope.empty() && rng_.chance(0.15))
        fresh.push_back(rng_.pick(scope));
      else
        fresh.push_back("y" + std::to_string(qdepth) + "_" + std::to_string(i + 1));
    }
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    std::vector<std::string> args;
    for (std::size_t i = 0; i < arity; ++i) {
      bool use_bound = scope.empty() || rng_.chance(0.5);
      args.push_back(use_bound ? rng_.pick(fresh) : rng_.pick(scope));
    }
    std::vector<std::string> guard_vars = args;
    std::sort(guard_vars.begin(), guard_vars.end());
    guard_vars.erase(std::unique(guard_vars.begin(), guard_vars.end()), guard_vars.end());
    Formula body = rng_.chance(0.15) ? Formula::truth(true) : gen(guard_vars, qdepth - 1, fuel);
    return Formula::exists(fresh, Formula::rel(name, args), body);
  }

  const Schema& schema_;
  Rng rng_;
  std::vector<std::pair<std::string, std::size_t>> rels_;
};

}  // namespace detail

// Random guarded formula whose free variables are among `free_vars`, with
// quantifier nesting at most `max_quantifier_depth`.
inline Formula random_gf(const Schema& schema, const std::vector<std::string>& free_vars,
                         std::size_t max_quantifier_depth, std::uint64_t seed, int size = 16) {
  if (schema.relations().empty()) throw CheckError("random_gf needs a nonempty schema");
  return detail::GFGenerator(schema, seed).gen(free_vars, max_quantifier_depth, size);
}

}  // namespace semijoin
