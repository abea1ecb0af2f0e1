#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semijoin/atomic_type.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"
#include "semijoin/game.hpp"
#include "semijoin/sa.hpp"

namespace semijoin {

// Builds the expressions E_a^0 and E_a^r for tuples a of one database.  All
// results of one Synthesizer share subexpressions (E_c^r for every c and r,
// the arity-j tuple-space expressions).
class Synthesizer {
 public:
  Synthesizer(const Database& db, Omega omega) : db_(db), omega_(omega) {
    const Schema& schema = db.schema();
    for (const auto& [name, arity] : schema.relations())
      for (const auto& x : ascending_subsets(arity)) projections_.emplace_back(name, x);
    std::map<Tuple, std::vector<std::size_t>> member;
    for (std::size_t i = 0; i < projections_.size(); ++i) {
      const auto& [name, x] = projections_[i];
      for (const Tuple& t : db.relation(name)) {
        auto& list = member[project_tuple(t, x)];
        if (list.empty() || list.back() != i) list.push_back(i);
      }
    }
    for (auto& [t, list] : member) {
      space_.push_back(t);
      membership_.push_back(std::move(list));
    }
  }

  const std::vector<Tuple>& tuple_space() const { return space_; }

  // σ_{θ_a}(⋂ π_X(R) over memberships of a) − ⋃ π_X(R) over same-arity
  // non-memberships.
  SAExpr e0(const Tuple& a) {
    std::size_t i = index(a);
    if (auto it = e0_memo_.find(i); it != e0_memo_.end()) return it->second;
    std::vector<SAExpr> in, out;
    std::size_t next = 0;
    for (std::size_t p = 0; p < projections_.size(); ++p) {
      bool member = next < membership_[i].size() && membership_[i][next] == p;
      if (member) ++next;
      if (projections_[p].second.size() != a.size()) continue;
      (member ? in : out).push_back(projection_expr(p));
    }
    SAExpr e = intersect_all(in);
    Condition theta = atomic_type(a, omega_).to_condition();
    if (theta.kind() != Condition::Kind::kTrue) e = SAExpr::select(theta, e);
    if (!out.empty()) e = SAExpr::difference(e, union_all(out));
    e0_memo_.emplace(i, e);
    return e;
  }

  // E_a^r: contains b exactly when the duplicator wins r rounds from (a,b).
  SAExpr er(const Tuple& a, std::size_t r) {
    if (r == 0) return e0(a);
    std::size_t i = index(a);
    if (auto it = er_memo_.find({i, r}); it != er_memo_.end()) return it->second;
    SAExpr base = e0(a);
    AtomicType own = atomic_type(a, omega_);

    // Every spoiler move c in A has an answer.
    std::vector<SAExpr> forth;
    for (const Tuple& c : space_) {
      Condition theta = atomic_type(a, c, omega_).to_condition();
      forth.push_back(SAExpr::semijoin(theta, base, er(c, r - 1)));
    }
    SAExpr e = intersect_all(forth);

    // No spoiler move d in B, of type θ over (b,d), escapes every E_c^{r-1}
    // with θ(a,c).
    std::vector<SAExpr> back;
    for (std::size_t j = 0; j <= db_.schema().max_arity(); ++j) {
      auto universe = universe_expr(j);
      if (!universe) continue;
      if (a.size() + j > kAtomicTypeCap)
        throw CheckError("atomic-type enumeration cap exceeded (" + std::to_string(a.size()) + "+" +
                         std::to_string(j) + " > " + std::to_string(kAtomicTypeCap) + ")");
      for (const AtomicType& theta : enumerate_atomic_types(a.size(), j, omega_)) {
        if (!(theta.restrict_left() == own)) continue;
        std::vector<SAExpr> escape;
        for (const Tuple& c : space_)
          if (c.size() == j && atomic_type(a, c, omega_) == theta)
            escape.push_back(SAExpr::difference(*universe, er(c, r - 1)));
        SAExpr target = escape.empty() ? *universe : intersect_all(escape);
        back.push_back(SAExpr::semijoin(theta.to_condition(), base, target));
      }
    }
    if (!back.empty()) e = intersection(e, SAExpr::difference(base, union_all(back)));
    er_memo_.emplace(std::make_pair(i, r), e);
    return e;
  }

 private:
  std::size_t index(const Tuple& a) const {
    auto it = std::lower_bound(space_.begin(), space_.end(), a);
    if (it == space_.end() || *it != a)
      throw CheckError("tuple " + db_.format_tuple(a) + " is not in the tuple space");
    return static_cast<std::size_t>(it - space_.begin());
  }

  SAExpr projection_expr(std::size_t p) {
    if (auto it = proj_memo_.find(p); it != proj_memo_.end()) return it->second;
    const auto& [name, x] = projections_[p];
    SAExpr e = SAExpr::relation(name);
    if (x.size() != db_.schema().arity(name)) {
      std::vector<std::size_t> idx;
      for (std::size_t q : x) idx.push_back(q + 1);
      e = SAExpr::project(std::move(idx), e);
    }
    proj_memo_.emplace(p, e);
    return e;
  }

  std::optional<SAExpr> universe_expr(std::size_t j) {
    if (auto it = universe_memo_.find(j); it != universe_memo_.end()) return it->second;
    auto e = tuple_space_expr(j, db_.schema());
    universe_memo_.emplace(j, e);
    return e;
  }

  const Database& db_;
  Omega omega_;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> projections_;
  std::vector<Tuple> space_;
  std::vector<std::vector<std::size_t>> membership_;
  std::map<std::size_t, SAExpr> e0_memo_, proj_memo_;
  std::map<std::pair<std::size_t, std::size_t>, SAExpr> er_memo_;
  std::map<std::size_t, std::optional<SAExpr>> universe_memo_;
};

inline SAExpr synth_E0(const Database& db, const Tuple& a, Omega omega) { return Synthesizer(db, omega).e0(a); }

inline SAExpr synth_Er(const Database& db, const Tuple& a, std::size_t r, Omega omega) {
  return Synthesizer(db, omega).er(a, r);
}

// An expression E with a ∈ E(A) and b ∉ E(B), or nullopt when (a,b) lies in
// the fixpoint.  Built at the spoiler rank; when the databases disagree on
// the nonemptiness of some relation S, the nullary guard π_∅(S) separates
// them directly.  The result is checked by evaluation before it is returned.
inline std::optional<SAExpr> distinguish(const Game& g, int a, int b) {
  int r = g.rank(a, b);
  if (r < 0) return std::nullopt;
  const Database& A = g.db(Side::kA);
  const Database& B = g.db(Side::kB);
  const Tuple& ta = g.positions(Side::kA)[static_cast<std::size_t>(a)];
  const Tuple& tb = g.positions(Side::kB)[static_cast<std::size_t>(b)];
  if (!g.is_move(Side::kA, a))
    throw CheckError("tuple " + A.format_tuple(ta) + " is not in the tuple space of A");
  Synthesizer synth(A, g.omega());
  SAExpr base = synth.e0(ta);
  std::optional<SAExpr> e;
  if (r == 0) e = base;
  for (const auto& [name, _] : A.schema().relations()) {
    if (e) break;
    bool in_a = !A.relation(name).empty(), in_b = !B.relation(name).empty();
    if (in_a == in_b) continue;
    SAExpr guarded = SAExpr::semijoin(Condition::truth(true), base, SAExpr::project({}, SAExpr::relation(name)));
    e = in_a ? guarded : SAExpr::difference(base, guarded);
  }
  if (!e) e = synth.er(ta, static_cast<std::size_t>(r));
  if (!eval_sa(*e, A).contains(ta) || eval_sa(*e, B).contains(tb))
    throw InternalError("synthesized expression does not separate " + A.format_tuple(ta) + " from " +
                        B.format_tuple(tb));
  return e;
}

inline std::optional<SAExpr> distinguish(const Database& A, const Database& B, const Tuple& a, const Tuple& b,
                                         Omega omega) {
  Game g(A, B, omega);
  return distinguish(g, g.require(Side::kA, a), g.require(Side::kB, b));
}

}  // namespace semijoin
