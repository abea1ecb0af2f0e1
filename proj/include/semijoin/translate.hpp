#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "semijoin/condition.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"
#include "semijoin/gf.hpp"
#include "semijoin/sa.hpp"

namespace semijoin {

// Target relation R and an injective map f : {1..k} → {1..arity(R)}, stored
// 1-based as f[i-1] = f(i).
struct InjectionSpec {
  std::string relation;
  std::vector<std::size_t> f;

  void validate(const Schema& schema) const {
    std::size_t arity = schema.arity(relation);
    std::vector<bool> hit(arity + 1, false);
    for (std::size_t v : f) {
      if (v == 0 || v > arity)
        throw CheckError("injection value " + std::to_string(v) + " outside arity of " + relation);
      if (hit[v]) throw CheckError("injection is not injective (" + std::to_string(v) + " repeated)");
      hit[v] = true;
    }
  }
};

// Parses "1:2,2:1" (entries i:f(i), every i in 1..k exactly once).
inline InjectionSpec parse_injection(const std::string& relation, const std::string& text) {
  InjectionSpec spec{relation, {}};
  std::map<std::size_t, std::size_t> m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    auto colon = item.find(':');
    if (colon == std::string::npos) throw ParseError("injection entries are i:f(i)", 1, pos + 1);
    std::size_t i = 0, v = 0;
    try {
      i = std::stoul(item.substr(0, colon));
      v = std::stoul(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ParseError("injection entries are i:f(i)", 1, pos + 1);
    }
    if (!m.emplace(i, v).second) throw ParseError("injection entry repeated", 1, pos + 1);
    pos = comma + 1;
  }
  for (std::size_t i = 1; i <= m.size(); ++i) {
    auto it = m.find(i);
    if (it == m.end()) throw CheckError("injection must define 1.." + std::to_string(m.size()));
    spec.f.push_back(it->second);
  }
  return spec;
}

// Canonical output variables x1..xk.
inline std::vector<std::string> output_vars(std::size_t k) {
  std::vector<std::string> v;
  for (std::size_t i = 1; i <= k; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

namespace detail {

// Injective maps {0..n-1} → {0..m-1}, lexicographic.
inline std::vector<std::vector<std::size_t>> injections(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  if (n > m) return out;
  std::vector<std::size_t> cur;
  std::vector<bool> used(m, false);
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t p = 0; p < m; ++p) {
      if (used[p]) continue;
      used[p] = true;
      cur.push_back(p);
      self(self);
      cur.pop_back();
      used[p] = false;
    }
  };
  rec(rec);
  return out;
}

inline Formula condition_to_gf(const Condition& c, const std::vector<std::string>& args) {
  using K = Condition::Kind;
  switch (c.kind()) {
    case K::kTrue: return Formula::truth(true);
    case K::kFalse: return Formula::truth(false);
    case K::kAtom: {
      if (c.lhs().side != Position::Side::kLeft || c.rhs().side != Position::Side::kLeft)
        throw CheckError("selection condition references a right position");
      Formula eq = Formula::eq(args.at(c.lhs().index - 1), args.at(c.rhs().index - 1));
      if (c.op() == CompareOp::kEq) return eq;
      if (c.op() == CompareOp::kNe) return Formula::negate(eq);
      throw CheckError("order atoms have no counterpart over Ω={=}");
    }
    case K::kNot: return Formula::negate(condition_to_gf(c.children()[0], args));
    case K::kAnd:
    case K::kOr: {
      std::vector<Formula> parts;
      for (const auto& ch : c.children()) parts.push_back(condition_to_gf(ch, args));
      return c.kind() == K::kAnd ? Formula::conj_all(parts) : Formula::disj_all(parts);
    }
  }
  return Formula::truth(false);
}

// Structural translation of SA= into GF.  translate(E, args) yields a formula
// whose free variables are among args and which holds of d exactly when
// d ∈ E(D).  Bound variables introduced at quantifier depth L are named
// t<L>_<position>, so they never clash with variables in scope; translations
// of the same (subexpression, arguments, depth) are shared.
class SAToGF {
 public:
  explicit SAToGF(const Schema& s) : schema_(s), checker_(s) {}

  Formula translate(const SAExpr& e, const std::vector<std::string>& args, std::size_t level) {
    std::string key = std::to_string(level);
    for (const auto& a : args) key += '\x1f' + a;
    auto mk = std::make_pair(e.id(), key);
    if (auto it = memo_.find(mk); it != memo_.end()) return it->second;
    Formula f = compute(e, args, level);
    memo_.emplace(mk, f);
    return f;
  }

 private:
  Formula compute(const SAExpr& e, const std::vector<std::string>& args, std::size_t level) {
    using K = SAExpr::Kind;
    switch (e.kind()) {
      case K::kRelation: return Formula::rel(e.name(), args);
      case K::kUnion:
        return Formula::disj(translate(e.left(), args, level), translate(e.right(), args, level));
      case K::kDifference:
        return Formula::conj(translate(e.left(), args, level),
                             Formula::negate(translate(e.right(), args, level)));
      case K::kSelection:
        return Formula::conj(translate(e.operand(), args, level), condition_to_gf(e.condition(), args));
      case K::kProjection: {
        // Output position l of the projection is position f(i_l) of the
        // embedding tuple.
        std::size_t n = checker_.check(e.operand()).arity;
        std::vector<std::pair<std::size_t, std::string>> fixed;  // operand position → variable
        for (std::size_t l = 0; l < e.indices().size(); ++l)
          fixed.emplace_back(e.indices()[l] - 1, args[l]);
        return embeddings(e.operand(), n, fixed, level);
      }
      case K::kSemijoin: {
        std::size_t n = checker_.check(e.right()).arity;
        // y_j takes the variable of the first x_i equated with it; any further
        // x_i' equated with the same y_j must equal that variable.
        std::map<std::size_t, std::string> rep;
        std::vector<Formula> eqs;
        for (auto [i, j] : e.condition().equality_pairs()) {
          auto [it, inserted] = rep.emplace(j - 1, args[i - 1]);
          if (!inserted && it->second != args[i - 1]) eqs.push_back(Formula::eq(it->second, args[i - 1]));
        }
        std::vector<std::pair<std::size_t, std::string>> fixed(rep.begin(), rep.end());
        Formula f = translate(e.left(), args, level);
        for (const auto& q : eqs) f = Formula::conj(f, q);
        return Formula::conj(f, embeddings(e.right(), n, fixed, level));
      }
    }
    return Formula::truth(false);
  }

  // ⋁_R ⋁_{f injective} ∃ unfixed (R(t) ∧ φ_E(t_{f(1)},…,t_{f(n)})), where
  // t_{f(p)} is replaced by the given variable for each fixed operand
  // position p.
  Formula embeddings(const SAExpr& e, std::size_t n,
                     const std::vector<std::pair<std::size_t, std::string>>& fixed, std::size_t level) {
    std::vector<Formula> disjuncts;
    for (const auto& [name, arity] : schema_.relations()) {
      for (const auto& f : injections(n, arity)) {
        std::vector<std::string> guard(arity);
        std::vector<bool> taken(arity, false);
        for (const auto& [p, var] : fixed) {
          guard[f[p]] = var;
          taken[f[p]] = true;
        }
        std::vector<std::string> bound;
        for (std::size_t q = 0; q < arity; ++q)
          if (!taken[q]) {
            guard[q] = "t" + std::to_string(level + 1) + "_" + std::to_string(q + 1);
            bound.push_back(guard[q]);
          }
        std::vector<std::string> inner_args;
        for (std::size_t p = 0; p < n; ++p) inner_args.push_back(guard[f[p]]);
        Formula body = translate(e, inner_args, level + 1);
        Formula atom = Formula::rel(name, guard);
        disjuncts.push_back(bound.empty() ? Formula::conj(atom, body)
                                          : Formula::exists(bound, atom, body));
      }
    }
    return Formula::disj_all(disjuncts);
  }

  const Schema& schema_;
  SAChecker checker_;
  std::map<std::pair<const void*, std::string>, Formula> memo_;
};

// Structural translation of guarded formulas into SA=.  rec(φ, vars, base, f)
// builds {v | φ(v)} ⋉_{∧ v_i = y_{f(i)}} base.
class GFToSA {
 public:
  explicit GFToSA(const Schema& s) : schema_(s) {}

  SAExpr rec(const Formula& phi, const std::vector<std::string>& vars, const SAExpr& base,
             const std::vector<std::size_t>& f) {
    SAExpr p = SAExpr::project(f, base);
    auto index = [&](const std::string& v) -> std::size_t {
      auto it = std::find(vars.begin(), vars.end(), v);
      if (it == vars.end()) throw CheckError("variable '" + v + "' is not among the free variables");
      return static_cast<std::size_t>(it - vars.begin()) + 1;
    };
    using K = Formula::Kind;
    switch (phi.kind()) {
      case K::kTrue: return p;
      case K::kFalse: return SAExpr::difference(p, p);
      case K::kRel: {
        std::vector<Condition> eqs;
        for (std::size_t m = 0; m < phi.vars().size(); ++m)
          eqs.push_back(Condition::atom(Position::x(index(phi.vars()[m])), CompareOp::kEq, Position::y(m + 1)));
        return SAExpr::semijoin(Condition::conj(std::move(eqs)), p, SAExpr::relation(phi.name()));
      }
      case K::kEq:
        return SAExpr::select(Condition::atom(Position::x(index(phi.vars()[0])), CompareOp::kEq,
                                              Position::x(index(phi.vars()[1]))),
                              p);
      case K::kNot: return SAExpr::difference(p, rec(phi.child(0), vars, base, f));
      case K::kOr:
        return SAExpr::union_of(rec(phi.child(0), vars, base, f), rec(phi.child(1), vars, base, f));
      case K::kAnd: {
        SAExpr a = rec(phi.child(0), vars, base, f), b = rec(phi.child(1), vars, base, f);
        return SAExpr::difference(a, SAExpr::difference(p, b));
      }
      case K::kImplies: {
        SAExpr a = rec(phi.child(0), vars, base, f), b = rec(phi.child(1), vars, base, f);
        return SAExpr::union_of(SAExpr::difference(p, a), b);
      }
      case K::kIff: {
        SAExpr a = rec(phi.child(0), vars, base, f), b = rec(phi.child(1), vars, base, f);
        return SAExpr::union_of(intersection(a, b), SAExpr::difference(p, SAExpr::union_of(a, b)));
      }
      case K::kExists: return exists_case(phi, p, index);
    }
    return p;
  }

 private:
  template <typename Index>
  SAExpr exists_case(const Formula& phi, const SAExpr& p, Index index) {
    const Formula& guard = phi.guard();
    const auto& bound = phi.bound();
    auto is_bound = [&](const std::string& v) {
      return std::find(bound.begin(), bound.end(), v) != bound.end();
    };
    // Outer variables first, then bound ones, each by first occurrence in
    // the guard; g maps each to that first occurrence.
    std::vector<std::string> outer, inner;
    std::vector<std::size_t> g_outer, g_inner;
    std::vector<Condition> repeats;
    const auto& gv = guard.vars();
    for (std::size_t pos = 0; pos < gv.size(); ++pos) {
      auto first = std::find(gv.begin(), gv.end(), gv[pos]);
      std::size_t first_pos = static_cast<std::size_t>(first - gv.begin());
      if (first_pos != pos) {
        repeats.push_back(Condition::atom(Position::x(first_pos + 1), CompareOp::kEq, Position::x(pos + 1)));
        continue;
      }
      if (is_bound(gv[pos])) {
        inner.push_back(gv[pos]);
        g_inner.push_back(pos + 1);
      } else {
        outer.push_back(gv[pos]);
        g_outer.push_back(pos + 1);
      }
    }
    std::vector<std::string> new_vars = outer;
    new_vars.insert(new_vars.end(), inner.begin(), inner.end());
    std::vector<std::size_t> g = g_outer;
    g.insert(g.end(), g_inner.begin(), g_inner.end());
    SAExpr base = SAExpr::relation(guard.name());
    if (!repeats.empty()) base = SAExpr::select(Condition::conj(std::move(repeats)), base);
    SAExpr body = rec(phi.body(), new_vars, base, g);
    std::vector<Condition> theta;
    for (std::size_t j = 0; j < outer.size(); ++j)
      theta.push_back(Condition::atom(Position::x(index(outer[j])), CompareOp::kEq, Position::y(j + 1)));
    return SAExpr::semijoin(Condition::conj(std::move(theta)), p, body);
  }

  const Schema& schema_;
};

}  // namespace detail

// GF formula over x1..xk defining E(D) for every database D.  Requires an
// eq-conjunctive expression without order atoms.
inline Formula sa_to_gf(const SAExpr& e, const Schema& schema) {
  SATyping t = check_sa(e, schema);
  if (t.dialect.conditions != ConditionClass::kEqConjunctive)
    throw CheckError("sa_to_gf needs an eq-conjunctive expression (dialect " + t.dialect.to_string() + ")");
  return detail::SAToGF(schema).translate(e, output_vars(t.arity), 0);
}

// SA= expression for {v | φ(v)} ⋉_θ R with θ = ∧ v_i = y_{f(i)}, where v is
// the ordered variable list `vars` (x1..xk by default).
inline SAExpr gf_to_sa(const Formula& phi, const std::vector<std::string>& vars, const InjectionSpec& spec,
                       const Schema& schema) {
  if (!check_guarded(phi, schema)) throw CheckError("formula is not guarded: " + to_string(phi));
  spec.validate(schema);
  if (spec.f.size() != vars.size())
    throw CheckError("injection has " + std::to_string(spec.f.size()) + " entries for " +
                     std::to_string(vars.size()) + " variables");
  for (const auto& v : phi.free_vars())
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw CheckError("free variable '" + v + "' is not among the listed variables");
  return detail::GFToSA(schema).rec(phi, vars, SAExpr::relation(spec.relation), spec.f);
}

inline SAExpr gf_to_sa(const Formula& phi, std::size_t k, const InjectionSpec& spec, const Schema& schema) {
  return gf_to_sa(phi, output_vars(k), spec, schema);
}

// Nullary SA= expression that is {⟨⟩} exactly when φ holds, on every
// database where `relation` is nonempty.
inline SAExpr gf_sentence_to_sa0(const Formula& phi, const std::string& relation, const Schema& schema) {
  if (!phi.free_vars().empty()) throw CheckError("not a sentence: " + to_string(phi));
  return gf_to_sa(phi, std::vector<std::string>{}, InjectionSpec{relation, {}}, schema);
}

}  // namespace semijoin
