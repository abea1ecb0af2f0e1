#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semijoin/condition.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"

namespace semijoin {

// Semijoin-algebra expression.  Immutable; subexpressions are shared, so a
// synthesized expression is a DAG whose printed tree may be far larger than
// its node count.  Projection indices are 1-based, duplicate-free and may be
// given in any order (ordered projection); ascending lists are the set-style
// projections of the algebra's original definition.
class SAExpr {
 public:
  enum class Kind : std::uint8_t { kRelation, kUnion, kDifference, kSelection, kProjection, kSemijoin };

  static SAExpr relation(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kRelation;
    n->name = std::move(name);
    return SAExpr(std::move(n));
  }
  static SAExpr union_of(SAExpr a, SAExpr b) { return binary(Kind::kUnion, {}, std::move(a), std::move(b)); }
  static SAExpr difference(SAExpr a, SAExpr b) {
    return binary(Kind::kDifference, {}, std::move(a), std::move(b));
  }
  static SAExpr semijoin(Condition cond, SAExpr a, SAExpr b) {
    return binary(Kind::kSemijoin, std::move(cond), std::move(a), std::move(b));
  }
  static SAExpr select(Condition cond, SAExpr e) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kSelection;
    n->cond = std::move(cond);
    n->lhs = std::make_shared<SAExpr>(std::move(e));
    return SAExpr(std::move(n));
  }
  static SAExpr project(std::vector<std::size_t> indices, SAExpr e) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kProjection;
    n->indices = std::move(indices);
    n->lhs = std::make_shared<SAExpr>(std::move(e));
    return SAExpr(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const Condition& condition() const { return node_->cond; }
  const std::vector<std::size_t>& indices() const { return node_->indices; }
  const SAExpr& left() const { return *node_->lhs; }
  const SAExpr& right() const { return *node_->rhs; }
  // Also the operand of unary nodes.
  const SAExpr& operand() const { return *node_->lhs; }

  // Node identity, used as the memoization key.
  const void* id() const { return node_.get(); }

  friend bool operator==(const SAExpr& a, const SAExpr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case Kind::kRelation: return a.name() == b.name();
      case Kind::kProjection: return a.indices() == b.indices() && a.operand() == b.operand();
      case Kind::kSelection: return a.condition() == b.condition() && a.operand() == b.operand();
      case Kind::kSemijoin:
        if (!(a.condition() == b.condition())) return false;
        [[fallthrough]];
      default: return a.left() == b.left() && a.right() == b.right();
    }
  }

 private:
  struct Node {
    Kind kind = Kind::kRelation;
    std::string name;
    Condition cond;
    std::vector<std::size_t> indices;
    std::shared_ptr<const SAExpr> lhs, rhs;
  };

  explicit SAExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static SAExpr binary(Kind k, Condition cond, SAExpr a, SAExpr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->cond = std::move(cond);
    n->lhs = std::make_shared<SAExpr>(std::move(a));
    n->rhs = std::make_shared<SAExpr>(std::move(b));
    return SAExpr(std::move(n));
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Derived operators.

// E1 ∩ E2 := E1 − (E1 − E2).
inline SAExpr intersection(const SAExpr& a, const SAExpr& b) {
  return SAExpr::difference(a, SAExpr::difference(a, b));
}

namespace detail {

template <typename Combine>
SAExpr balanced_fold(const std::vector<SAExpr>& items, std::size_t lo, std::size_t hi, Combine combine) {
  if (hi - lo == 1) return items[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  return combine(balanced_fold(items, lo, mid, combine), balanced_fold(items, mid, hi, combine));
}

}  // namespace detail

// Balanced folds keep the printed size of long intersections polynomial.
inline SAExpr intersect_all(const std::vector<SAExpr>& items) {
  if (items.empty()) throw CheckError("empty intersection has no arity");
  return detail::balanced_fold(items, 0, items.size(), intersection);
}

inline SAExpr union_all(const std::vector<SAExpr>& items) {
  if (items.empty()) throw CheckError("empty union has no arity");
  return detail::balanced_fold(items, 0, items.size(), SAExpr::union_of);
}

// ⋃_R ⋃_{#X=k, X ascending} π_X(R): the arity-k part of the tuple space.
// Returns nullopt when no relation has arity >= k.
inline std::optional<SAExpr> tuple_space_expr(std::size_t k, const Schema& schema) {
  std::vector<SAExpr> parts;
  for (const auto& [name, arity] : schema.relations()) {
    if (arity < k) continue;
    for (const auto& x : ascending_subsets(arity)) {
      if (x.size() != k) continue;
      if (k == arity) {
        parts.push_back(SAExpr::relation(name));
        continue;
      }
      std::vector<std::size_t> idx;
      for (std::size_t p : x) idx.push_back(p + 1);
      parts.push_back(SAExpr::project(std::move(idx), SAExpr::relation(name)));
    }
  }
  if (parts.empty()) return std::nullopt;
  return union_all(parts);
}

// E^compl for an arity-k expression: the arity-k tuple space minus E.
inline SAExpr complement(const SAExpr& e, std::size_t k, const Schema& schema) {
  auto universe = tuple_space_expr(k, schema);
  if (!universe) throw CheckError("no relation of arity >= " + std::to_string(k));
  return SAExpr::difference(*universe, e);
}

// ---------------------------------------------------------------------------
// Dialects and static checking.

enum class ProjectionStyle : std::uint8_t { kSet, kOrdered };
enum class ConditionClass : std::uint8_t { kEqConjunctive, kQfEquality, kQfOmega };

struct Dialect {
  ProjectionStyle projection = ProjectionStyle::kSet;
  ConditionClass conditions = ConditionClass::kEqConjunctive;

  // True when every expression of `this` also belongs to `other`.
  bool within(const Dialect& other) const {
    return static_cast<int>(projection) <= static_cast<int>(other.projection) &&
           static_cast<int>(conditions) <= static_cast<int>(other.conditions);
  }
  Dialect join(const Dialect& o) const {
    return {std::max(projection, o.projection), std::max(conditions, o.conditions)};
  }
  std::string to_string() const {
    std::string p = projection == ProjectionStyle::kSet ? "set" : "ordered";
    const char* c = conditions == ConditionClass::kEqConjunctive ? "eq-conjunctive"
                    : conditions == ConditionClass::kQfEquality  ? "qf-equality"
                                                                 : "qf-omega";
    return "{" + p + ", " + c + "}";
  }
  friend bool operator==(const Dialect&, const Dialect&) = default;
};

struct SATyping {
  std::size_t arity = 0;
  Dialect dialect;
};

namespace detail {

class SAChecker {
 public:
  explicit SAChecker(const Schema& s) : schema_(s) {}

  SATyping check(const SAExpr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    SATyping t = compute(e);
    memo_.emplace(e.id(), t);
    return t;
  }

 private:
  static ConditionClass selection_class(const Condition& c) {
    return c.uses_order() ? ConditionClass::kQfOmega : ConditionClass::kEqConjunctive;
  }
  static ConditionClass semijoin_class(const Condition& c) {
    if (c.uses_order()) return ConditionClass::kQfOmega;
    return c.is_eq_conjunctive() ? ConditionClass::kEqConjunctive : ConditionClass::kQfEquality;
  }

  SATyping compute(const SAExpr& e) {
    using K = SAExpr::Kind;
    switch (e.kind()) {
      case K::kRelation: return {schema_.arity(e.name()), {}};
      case K::kUnion:
      case K::kDifference: {
        SATyping a = check(e.left()), b = check(e.right());
        if (a.arity != b.arity)
          throw CheckError(std::string(e.kind() == K::kUnion ? "union" : "diff") +
                           " of arities " + std::to_string(a.arity) + " and " +
                           std::to_string(b.arity));
        return {a.arity, a.dialect.join(b.dialect)};
      }
      case K::kSelection: {
        SATyping a = check(e.operand());
        e.condition().validate(a.arity, 0);
        Dialect d = a.dialect;
        d.conditions = std::max(d.conditions, selection_class(e.condition()));
        return {a.arity, d};
      }
      case K::kProjection: {
        SATyping a = check(e.operand());
        const auto& idx = e.indices();
        std::vector<bool> used(a.arity + 1, false);
        bool ascending = true;
        for (std::size_t i = 0; i < idx.size(); ++i) {
          if (idx[i] == 0 || idx[i] > a.arity)
            throw CheckError("projection index " + std::to_string(idx[i]) +
                             " outside operand arity " + std::to_string(a.arity));
          if (used[idx[i]]) throw CheckError("projection index " + std::to_string(idx[i]) + " repeated");
          used[idx[i]] = true;
          if (i && idx[i] < idx[i - 1]) ascending = false;
        }
        Dialect d = a.dialect;
        if (!ascending) d.projection = ProjectionStyle::kOrdered;
        return {idx.size(), d};
      }
      case K::kSemijoin: {
        SATyping a = check(e.left()), b = check(e.right());
        e.condition().validate(a.arity, b.arity);
        Dialect d = a.dialect.join(b.dialect);
        d.conditions = std::max(d.conditions, semijoin_class(e.condition()));
        return {a.arity, d};
      }
    }
    return {};
  }

  const Schema& schema_;
  std::unordered_map<const void*, SATyping> memo_;
};

}  // namespace detail

// Arity and least dialect of e; throws CheckError on unknown relations, arity
// mismatches, bad projection indices and out-of-range condition positions.
inline SATyping check_sa(const SAExpr& e, const Schema& schema) {
  return detail::SAChecker(schema).check(e);
}

// ---------------------------------------------------------------------------
// Printing and size measures.

inline std::string to_string(const SAExpr& e) {
  using K = SAExpr::Kind;
  switch (e.kind()) {
    case K::kRelation: return "rel " + e.name();
    case K::kUnion: return "union(" + to_string(e.left()) + ", " + to_string(e.right()) + ")";
    case K::kDifference: return "diff(" + to_string(e.left()) + ", " + to_string(e.right()) + ")";
    case K::kSelection:
      return "select[" + e.condition().to_string() + "](" + to_string(e.operand()) + ")";
    case K::kProjection: {
      std::string idx;
      for (std::size_t i = 0; i < e.indices().size(); ++i) {
        if (i) idx += ',';
        idx += std::to_string(e.indices()[i]);
      }
      return "project[" + idx + "](" + to_string(e.operand()) + ")";
    }
    case K::kSemijoin:
      return "semijoin[" + e.condition().to_string() + "](" + to_string(e.left()) + ", " +
             to_string(e.right()) + ")";
  }
  return "";
}

namespace detail {

template <typename F>
void for_each_child(const SAExpr& e, F&& f) {
  switch (e.kind()) {
    case SAExpr::Kind::kRelation: return;
    case SAExpr::Kind::kSelection:
    case SAExpr::Kind::kProjection: f(e.operand()); return;
    default: f(e.left()); f(e.right()); return;
  }
}

inline std::size_t depth_memo(const SAExpr& e, std::unordered_map<const void*, std::size_t>& memo) {
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  std::size_t d = 0;
  for_each_child(e, [&](const SAExpr& c) { d = std::max(d, depth_memo(c, memo)); });
  if (e.kind() == SAExpr::Kind::kSemijoin || e.kind() == SAExpr::Kind::kProjection) ++d;
  memo.emplace(e.id(), d);
  return d;
}

inline double tree_size_memo(const SAExpr& e, std::unordered_map<const void*, double>& memo) {
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  double s = 1;
  for_each_child(e, [&](const SAExpr& c) { s += tree_size_memo(c, memo); });
  memo.emplace(e.id(), s);
  return s;
}

inline void collect_nodes(const SAExpr& e, std::unordered_map<const void*, bool>& seen) {
  if (!seen.emplace(e.id(), true).second) return;
  for_each_child(e, [&](const SAExpr& c) { collect_nodes(c, seen); });
}

}  // namespace detail

// Maximum number of Semijoin/Projection nodes on a root-to-leaf path.
inline std::size_t nesting_depth(const SAExpr& e) {
  std::unordered_map<const void*, std::size_t> memo;
  return detail::depth_memo(e, memo);
}

// Node count of the expression printed as a tree.
inline double tree_size(const SAExpr& e) {
  std::unordered_map<const void*, double> memo;
  return detail::tree_size_memo(e, memo);
}

// Number of distinct shared nodes.
inline std::size_t dag_size(const SAExpr& e) {
  std::unordered_map<const void*, bool> seen;
  detail::collect_nodes(e, seen);
  return seen.size();
}

// ---------------------------------------------------------------------------
// Evaluation.

// Bottom-up evaluator memoized on node identity.  One instance per database;
// not shared between threads.
class SAEvaluator {
 public:
  explicit SAEvaluator(const Database& db) : db_(db) {}

  const TupleSet& eval(const SAExpr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    TupleSet r = compute(e);
    return memo_.emplace(e.id(), std::move(r)).first->second;
  }

 private:
  TupleSet compute(const SAExpr& e) {
    using K = SAExpr::Kind;
    switch (e.kind()) {
      case K::kRelation: return db_.relation(e.name());
      case K::kUnion: return set_union(eval(e.left()), eval(e.right()));
      case K::kDifference: return set_difference(eval(e.left()), eval(e.right()));
      case K::kSelection: {
        std::vector<Tuple> out;
        for (const Tuple& t : eval(e.operand()))
          if (e.condition().eval(t)) out.push_back(t);
        return TupleSet::from_sorted(std::move(out));
      }
      case K::kProjection: {
        std::vector<std::size_t> pos;
        for (std::size_t i : e.indices()) pos.push_back(i - 1);
        return project(eval(e.operand()), pos);
      }
      case K::kSemijoin: return semijoin(e.condition(), eval(e.left()), eval(e.right()));
    }
    return {};
  }

  static TupleSet semijoin(const Condition& cond, const TupleSet& a, const TupleSet& b) {
    std::vector<Tuple> out;
    if (b.empty()) return {};
    if (cond.is_eq_conjunctive()) {
      auto pairs = cond.equality_pairs();
      std::vector<std::size_t> xs, ys;
      for (auto [i, j] : pairs) {
        xs.push_back(i - 1);
        ys.push_back(j - 1);
      }
      TupleSet keys = project(b, ys);
      for (const Tuple& t : a)
        if (keys.contains(project_tuple(t, xs))) out.push_back(t);
      return TupleSet::from_sorted(std::move(out));
    }
    for (const Tuple& t : a)
      for (const Tuple& u : b)
        if (cond.eval(t, u)) {
          out.push_back(t);
          break;
        }
    return TupleSet::from_sorted(std::move(out));
  }

  const Database& db_;
  std::unordered_map<const void*, TupleSet> memo_;
};

// Checks e against the database schema, then evaluates it.
inline TupleSet eval_sa(const SAExpr& e, const Database& db) {
  check_sa(e, db.schema());
  SAEvaluator ev(db);
  return ev.eval(e);
}

// Brute-force embedding test: every result tuple z embeds injectively into
// some stored tuple, z_i = t_{f(i)} with f injective.  Only defined for
// eq-conjunctive expressions without order atoms.
inline bool lemma1_check(const SAExpr& e, const Database& db) {
  SATyping t = check_sa(e, db.schema());
  if (t.dialect.conditions != ConditionClass::kEqConjunctive)
    throw CheckError("embedding check needs an eq-conjunctive expression over Ω={=}");
  auto embeds = [](const Tuple& z, const Tuple& row) {
    // Injective f: try every assignment of distinct row positions.
    std::vector<std::size_t> f(z.size());
    std::vector<bool> used(row.size(), false);
    auto rec = [&](auto&& self, std::size_t i) -> bool {
      if (i == z.size()) return true;
      for (std::size_t p = 0; p < row.size(); ++p) {
        if (used[p] || row[p] != z[i]) continue;
        used[p] = true;
        f[i] = p;
        if (self(self, i + 1)) return true;
        used[p] = false;
      }
      return false;
    };
    return rec(rec, 0);
  };
  for (const Tuple& z : eval_sa(e, db)) {
    bool found = false;
    for (const auto& [name, rel] : db.relations()) {
      if (rel.empty() || db.schema().arity(name) < z.size()) continue;
      for (const Tuple& row : rel)
        if (embeds(z, row)) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace semijoin
