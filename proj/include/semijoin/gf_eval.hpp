#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "semijoin/database.hpp"
#include "semijoin/error.hpp"
#include "semijoin/gf.hpp"

namespace semijoin {

using Assignment = std::map<std::string, ValueId>;

// First-order evaluation over the active domain.  Quantifiers iterate the
// tuples of their guard relation; bound variables absent from the guard (only
// possible in unguarded formulas) range over the active domain.  Results of
// quantifier nodes are memoized per assignment of their free variables, which
// keeps evaluation polynomial in the size of the formula DAG.
class GFEvaluator {
 public:
  GFEvaluator(const Formula& f, const Database& db) : db_(db) {
    check_guarded(f, db.schema());
    root_ = compile(f);
  }

  // Variable names seen in the formula, indexed by slot.
  const std::vector<std::string>& slot_names() const { return slot_names_; }

  bool eval(const Assignment& assignment) {
    env_.assign(slot_names_.size(), 0);
    const auto& adom = db_.active_domain();
    for (int s : nodes_[root_].free) {
      auto it = assignment.find(slot_names_[s]);
      if (it == assignment.end())
        throw CheckError("free variable '" + slot_names_[s] + "' is unassigned");
      if (!std::binary_search(adom.begin(), adom.end(), it->second))
        throw CheckError("value of '" + slot_names_[s] + "' is outside the active domain");
      env_[s] = it->second;
    }
    return run(root_);
  }

 private:
  struct Node {
    Formula::Kind kind;
    const TupleSet* rel = nullptr;
    std::vector<int> slots;      // atom arguments / guard arguments
    std::vector<int> bound;      // quantified slots
    std::vector<int> free;       // free slots, memo key
    std::vector<int> unguarded;  // bound slots missing from the guard
    int a = -1, b = -1;
    std::unordered_map<std::string, bool> memo;
  };

  int slot(const std::string& v) {
    auto [it, inserted] = slot_of_.emplace(v, static_cast<int>(slot_names_.size()));
    if (inserted) slot_names_.push_back(v);
    return it->second;
  }

  int compile(const Formula& f) {
    if (auto it = compiled_.find(f.id()); it != compiled_.end()) return it->second;
    Node n;
    n.kind = f.kind();
    for (const auto& v : f.free_vars()) n.free.push_back(slot(v));
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::kRel:
        n.rel = &db_.relation(f.name());
        [[fallthrough]];
      case K::kEq:
        for (const auto& v : f.vars()) n.slots.push_back(slot(v));
        break;
      case K::kNot: n.a = compile(f.child(0)); break;
      case K::kAnd:
      case K::kOr:
      case K::kImplies:
      case K::kIff:
        n.a = compile(f.child(0));
        n.b = compile(f.child(1));
        break;
      case K::kExists: {
        n.rel = &db_.relation(f.guard().name());
        for (const auto& v : f.guard().vars()) n.slots.push_back(slot(v));
        for (const auto& v : f.bound()) {
          int s = slot(v);
          if (std::find(n.bound.begin(), n.bound.end(), s) != n.bound.end()) continue;
          n.bound.push_back(s);
          if (std::find(n.slots.begin(), n.slots.end(), s) == n.slots.end()) n.unguarded.push_back(s);
        }
        n.a = compile(f.body());
        break;
      }
      default: break;
    }
    nodes_.push_back(std::move(n));
    int id = static_cast<int>(nodes_.size() - 1);
    compiled_.emplace(f.id(), id);
    return id;
  }

  bool run(int i) {
    Node& n = nodes_[i];
    using K = Formula::Kind;
    switch (n.kind) {
      case K::kTrue: return true;
      case K::kFalse: return false;
      case K::kRel: {
        Tuple t(n.slots.size());
        for (std::size_t p = 0; p < t.size(); ++p) t[p] = env_[n.slots[p]];
        return n.rel->contains(t);
      }
      case K::kEq: return env_[n.slots[0]] == env_[n.slots[1]];
      case K::kNot: return !run(n.a);
      case K::kAnd: return run(n.a) && run(nodes_[i].b);
      case K::kOr: return run(n.a) || run(nodes_[i].b);
      case K::kImplies: return !run(n.a) || run(nodes_[i].b);
      case K::kIff: {
        bool l = run(n.a);
        return l == run(nodes_[i].b);
      }
      case K::kExists: return run_exists(i);
    }
    return false;
  }

  bool run_exists(int i) {
    std::string key;
    for (int s : nodes_[i].free) key.append(reinterpret_cast<const char*>(&env_[s]), sizeof(ValueId));
    if (auto it = nodes_[i].memo.find(key); it != nodes_[i].memo.end()) return it->second;

    const Node& n = nodes_[i];
    std::vector<ValueId> saved;
    for (int s : n.bound) saved.push_back(env_[s]);
    std::vector<bool> is_bound(slot_names_.size(), false);
    for (int s : n.bound) is_bound[s] = true;

    bool result = false;
    std::vector<bool> set(slot_names_.size(), false);
    for (const Tuple& t : *n.rel) {
      std::fill(set.begin(), set.end(), false);
      bool match = true;
      for (std::size_t p = 0; p < t.size() && match; ++p) {
        int s = n.slots[p];
        if (!is_bound[s]) {
          match = env_[s] == t[p];
        } else if (set[s]) {
          match = env_[s] == t[p];
        } else {
          env_[s] = t[p];
          set[s] = true;
        }
      }
      if (match && extend_unguarded(n.unguarded, 0, n.a)) {
        result = true;
        break;
      }
    }
    for (std::size_t k = 0; k < n.bound.size(); ++k) env_[n.bound[k]] = saved[k];
    nodes_[i].memo.emplace(std::move(key), result);
    return result;
  }

  bool extend_unguarded(const std::vector<int>& slots, std::size_t k, int body) {
    if (k == slots.size()) return run(body);
    for (ValueId v : db_.active_domain()) {
      env_[slots[k]] = v;
      if (extend_unguarded(slots, k + 1, body)) return true;
    }
    return false;
  }

  const Database& db_;
  std::vector<Node> nodes_;
  std::unordered_map<const void*, int> compiled_;
  std::unordered_map<std::string, int> slot_of_;
  std::vector<std::string> slot_names_;
  std::vector<ValueId> env_;
  int root_ = -1;
};

inline bool eval_gf(const Formula& f, const Database& db, const Assignment& assignment) {
  return GFEvaluator(f, db).eval(assignment);
}

// All active-domain tuples d with f(vars ↦ d) true.
inline TupleSet gf_result_set(const Formula& f, const Database& db, const std::vector<std::string>& vars) {
  for (const auto& v : f.free_vars())
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw CheckError("free variable '" + v + "' missing from the output variable list");
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i] == vars[j]) throw CheckError("output variable '" + vars[i] + "' repeated");
  GFEvaluator ev(f, db);
  const auto& adom = db.active_domain();
  std::vector<Tuple> out;
  Tuple t(vars.size());
  Assignment a;
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == vars.size()) {
      if (ev.eval(a)) out.push_back(t);
      return;
    }
    for (ValueId v : adom) {
      t[k] = v;
      a[vars[k]] = v;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
  return TupleSet::from_sorted(std::move(out));
}

}  // namespace semijoin
