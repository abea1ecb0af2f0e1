#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semijoin/database.hpp"
#include "semijoin/error.hpp"

namespace semijoin {

// Guarded-fragment formula.  Immutable and structurally shared; the free
// variables of every node are computed once at construction.
//
// Relation atoms may repeat variables.  `true` and `false` are admitted as
// the empty conjunction and disjunction.  A quantifier has the form
// ∃ȳ (α ∧ φ) where α is a relation atom (the guard); guardedness, i.e. that
// every free variable of φ occurs in α, is checked by check_guarded rather
// than enforced by the constructor, so unguarded formulas can be represented
// and rejected.
class Formula {
 public:
  enum class Kind : std::uint8_t { kTrue, kFalse, kRel, kEq, kNot, kAnd, kOr, kImplies, kIff, kExists };

  static Formula truth(bool v) {
    auto n = std::make_shared<Node>();
    n->kind = v ? Kind::kTrue : Kind::kFalse;
    return Formula(std::move(n));
  }

  static Formula rel(std::string name, std::vector<std::string> vars) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kRel;
    n->name = std::move(name);
    n->vars = std::move(vars);
    n->free = sorted_unique(n->vars);
    return Formula(std::move(n));
  }

  static Formula eq(std::string a, std::string b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kEq;
    n->vars = {std::move(a), std::move(b)};
    n->free = sorted_unique(n->vars);
    return Formula(std::move(n));
  }

  static Formula negate(Formula f) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kNot;
    n->free = f.free_vars();
    n->children.push_back(std::move(f));
    return Formula(std::move(n));
  }

  static Formula conj(Formula a, Formula b) { return binary(Kind::kAnd, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(Kind::kOr, std::move(a), std::move(b)); }
  static Formula implies(Formula a, Formula b) { return binary(Kind::kImplies, std::move(a), std::move(b)); }
  static Formula iff(Formula a, Formula b) { return binary(Kind::kIff, std::move(a), std::move(b)); }

  // ∃ bound (guard ∧ body).  The guard must be a relation atom.
  static Formula exists(std::vector<std::string> bound, Formula guard, Formula body) {
    if (guard.kind() != Kind::kRel) throw CheckError("quantifier guard must be a relation atom");
    auto n = std::make_shared<Node>();
    n->kind = Kind::kExists;
    n->vars = std::move(bound);
    std::vector<std::string> inner = guard.free_vars();
    inner.insert(inner.end(), body.free_vars().begin(), body.free_vars().end());
    for (const auto& v : sorted_unique(inner))
      if (std::find(n->vars.begin(), n->vars.end(), v) == n->vars.end()) n->free.push_back(v);
    n->children.push_back(std::move(guard));
    n->children.push_back(std::move(body));
    return Formula(std::move(n));
  }

  // Left-nested conjunction / disjunction of a list (true / false when empty).
  static Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return truth(true);
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
  }
  static Formula disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return truth(false);
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
  }

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  // Atom arguments, or the bound variables of a quantifier.
  const std::vector<std::string>& vars() const { return node_->vars; }
  const std::vector<std::string>& bound() const { return node_->vars; }
  const Formula& child(std::size_t i) const { return node_->children.at(i); }
  const Formula& guard() const { return node_->children.at(0); }
  const Formula& body() const { return node_->children.at(1); }
  // Sorted, duplicate-free.
  const std::vector<std::string>& free_vars() const { return node_->free; }
  const void* id() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    return a.kind() == b.kind() && a.name() == b.name() && a.vars() == b.vars() &&
           a.node_->children == b.node_->children;
  }

 private:
  struct Node {
    Kind kind = Kind::kTrue;
    std::string name;
    std::vector<std::string> vars;
    std::vector<Formula> children;
    std::vector<std::string> free;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  static Formula binary(Kind k, Formula a, Formula b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    std::vector<std::string> fv = a.free_vars();
    fv.insert(fv.end(), b.free_vars().begin(), b.free_vars().end());
    n->free = sorted_unique(std::move(fv));
    n->children.push_back(std::move(a));
    n->children.push_back(std::move(b));
    return Formula(std::move(n));
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::kIff: return 1;
    case Formula::Kind::kImplies: return 2;
    case Formula::Kind::kOr: return 3;
    case Formula::Kind::kAnd: return 4;
    case Formula::Kind::kNot: return 5;
    default: return 6;
  }
}

inline std::string join_vars(const std::vector<std::string>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ',';
    out += vs[i];
  }
  return out;
}

inline std::string print_formula(const Formula& f, int min_prec) {
  using K = Formula::Kind;
  std::string s;
  int p = precedence(f.kind());
  switch (f.kind()) {
    case K::kTrue: s = "true"; break;
    case K::kFalse: s = "false"; break;
    case K::kRel: s = f.name() + "(" + join_vars(f.vars()) + ")"; break;
    case K::kEq: s = f.vars()[0] + " = " + f.vars()[1]; break;
    case K::kNot:
      if (f.child(0).kind() == K::kEq) {
        s = f.child(0).vars()[0] + " != " + f.child(0).vars()[1];
        p = 6;
      } else {
        s = "!" + print_formula(f.child(0), 5);
      }
      break;
    case K::kAnd:
    case K::kOr:
    case K::kIff: {
      const char* op = f.kind() == K::kAnd ? " & " : f.kind() == K::kOr ? " | " : " <-> ";
      s = print_formula(f.child(0), p) + op + print_formula(f.child(1), p + 1);
      break;
    }
    case K::kImplies:
      s = print_formula(f.child(0), p + 1) + " -> " + print_formula(f.child(1), p);
      break;
    case K::kExists:
      s = "exists " + join_vars(f.bound()) + " (" + print_formula(f.guard(), 0) + " & " +
          print_formula(f.body(), 0) + ")";
      break;
  }
  return p < min_prec ? "(" + s + ")" : s;
}

inline void check_atoms(const Formula& f, const Schema& schema,
                        std::unordered_map<const void*, bool>& seen) {
  if (!seen.emplace(f.id(), true).second) return;
  if (f.kind() == Formula::Kind::kRel) {
    std::size_t arity = schema.arity(f.name());
    if (arity != f.vars().size())
      throw CheckError("atom " + f.name() + " has " + std::to_string(f.vars().size()) +
                       " arguments, relation arity is " + std::to_string(arity));
  }
  if (f.kind() == Formula::Kind::kExists && f.bound().empty())
    throw CheckError("quantifier binds no variables");
  switch (f.kind()) {
    case Formula::Kind::kNot: check_atoms(f.child(0), schema, seen); break;
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr:
    case Formula::Kind::kImplies:
    case Formula::Kind::kIff:
    case Formula::Kind::kExists:
      check_atoms(f.child(0), schema, seen);
      check_atoms(f.child(1), schema, seen);
      break;
    default: break;
  }
}

inline bool guarded_memo(const Formula& f, std::unordered_map<const void*, bool>& memo) {
  if (auto it = memo.find(f.id()); it != memo.end()) return it->second;
  bool ok = true;
  switch (f.kind()) {
    case Formula::Kind::kNot: ok = guarded_memo(f.child(0), memo); break;
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr:
    case Formula::Kind::kImplies:
    case Formula::Kind::kIff:
      ok = guarded_memo(f.child(0), memo) && guarded_memo(f.child(1), memo);
      break;
    case Formula::Kind::kExists: {
      const auto& gv = f.guard().free_vars();
      for (const auto& v : f.body().free_vars())
        if (!std::binary_search(gv.begin(), gv.end(), v)) ok = false;
      ok = ok && guarded_memo(f.body(), memo);
      break;
    }
    default: break;
  }
  memo.emplace(f.id(), ok);
  return ok;
}

}  // namespace detail

inline std::string to_string(const Formula& f) { return detail::print_formula(f, 0); }

// True iff every quantifier's guard covers the free variables of its body.
// Throws CheckError for unknown relations and atom arity mismatches.
inline bool check_guarded(const Formula& f, const Schema& schema) {
  std::unordered_map<const void*, bool> seen, memo;
  detail::check_atoms(f, schema, seen);
  return detail::guarded_memo(f, memo);
}

}  // namespace semijoin
