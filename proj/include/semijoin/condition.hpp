#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "semijoin/database.hpp"
#include "semijoin/error.hpp"

namespace semijoin {

// A position inside a (left, right) tuple pair: x_i or y_j, 1-based.
struct Position {
  enum class Side : std::uint8_t { kLeft, kRight };
  Side side = Side::kLeft;
  std::size_t index = 1;

  static Position x(std::size_t i) { return {Side::kLeft, i}; }
  static Position y(std::size_t j) { return {Side::kRight, j}; }

  std::string to_string() const {
    return (side == Side::kLeft ? "x" : "y") + std::to_string(index);
  }
  friend auto operator<=>(const Position&, const Position&) = default;
};

enum class CompareOp : std::uint8_t { kEq, kNe, kLt, kLe };

inline const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
  }
  return "?";
}

// Quantifier-free formula over Ω = {=, <} whose atoms compare positions of a
// left tuple (x) and an optional right tuple (y).  Immutable; copies share
// structure.
class Condition {
 public:
  enum class Kind : std::uint8_t { kTrue, kFalse, kAtom, kNot, kAnd, kOr };

  Condition() : Condition(make(Kind::kTrue)) {}

  static Condition truth(bool value) { return make(value ? Kind::kTrue : Kind::kFalse); }

  static Condition atom(Position lhs, CompareOp op, Position rhs) {
    if (lhs.index == 0 || rhs.index == 0)
      throw CheckError("condition positions are 1-based");
    auto n = std::make_shared<Node>();
    n->kind = Kind::kAtom;
    n->lhs = lhs;
    n->op = op;
    n->rhs = rhs;
    return Condition(std::move(n));
  }

  static Condition negate(Condition c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kNot;
    n->children.push_back(std::move(c));
    return Condition(std::move(n));
  }

  // Empty conjunction is true; a single operand is returned unchanged.
  static Condition conj(std::vector<Condition> cs) { return junction(Kind::kAnd, std::move(cs)); }
  static Condition disj(std::vector<Condition> cs) { return junction(Kind::kOr, std::move(cs)); }

  Kind kind() const { return node_->kind; }
  Position lhs() const { return node_->lhs; }
  Position rhs() const { return node_->rhs; }
  CompareOp op() const { return node_->op; }
  const std::vector<Condition>& children() const { return node_->children; }

  // Largest referenced x (resp. y) index, 0 when none.
  std::size_t max_left() const { return max_index(Position::Side::kLeft); }
  std::size_t max_right() const { return max_index(Position::Side::kRight); }

  bool uses_order() const {
    if (kind() == Kind::kAtom) return op() == CompareOp::kLt || op() == CompareOp::kLe;
    return std::any_of(children().begin(), children().end(),
                       [](const Condition& c) { return c.uses_order(); });
  }

  // Conjunction (possibly empty) of atoms x_i = y_j.
  bool is_eq_conjunctive() const {
    switch (kind()) {
      case Kind::kTrue: return true;
      case Kind::kAtom:
        return op() == CompareOp::kEq && lhs().side != rhs().side;
      case Kind::kAnd:
        return std::all_of(children().begin(), children().end(),
                           [](const Condition& c) { return c.is_eq_conjunctive(); });
      default: return false;
    }
  }

  // For eq-conjunctive conditions: the (i, j) pairs of the atoms x_i = y_j.
  std::vector<std::pair<std::size_t, std::size_t>> equality_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    collect_pairs(out);
    return out;
  }

  // Throws CheckError when a position exceeds the given arities.
  void validate(std::size_t left_arity, std::size_t right_arity) const {
    if (max_left() > left_arity || max_right() > right_arity)
      throw CheckError("condition " + to_string() + " references a position outside arities (" +
                       std::to_string(left_arity) + ", " + std::to_string(right_arity) + ")");
  }

  bool eval(const Tuple& left, const Tuple& right) const {
    switch (kind()) {
      case Kind::kTrue: return true;
      case Kind::kFalse: return false;
      case Kind::kAtom: {
        ValueId a = fetch(lhs(), left, right), b = fetch(rhs(), left, right);
        switch (op()) {
          case CompareOp::kEq: return a == b;
          case CompareOp::kNe: return a != b;
          case CompareOp::kLt: return a < b;
          case CompareOp::kLe: return a <= b;
        }
        return false;
      }
      case Kind::kNot: return !children()[0].eval(left, right);
      case Kind::kAnd:
        for (const auto& c : children())
          if (!c.eval(left, right)) return false;
        return true;
      case Kind::kOr:
        for (const auto& c : children())
          if (c.eval(left, right)) return true;
        return false;
    }
    return false;
  }

  bool eval(const Tuple& left) const { return eval(left, Tuple{}); }

  std::string to_string() const {
    switch (kind()) {
      case Kind::kTrue: return "true";
      case Kind::kFalse: return "false";
      case Kind::kAtom: return lhs().to_string() + op_text(op()) + rhs().to_string();
      case Kind::kNot: {
        const Condition& c = children()[0];
        bool wrap = c.kind() == Kind::kAnd || c.kind() == Kind::kOr;
        return "!" + (wrap ? "(" + c.to_string() + ")" : c.to_string());
      }
      case Kind::kAnd:
      case Kind::kOr: {
        std::string out;
        for (std::size_t i = 0; i < children().size(); ++i) {
          const Condition& c = children()[i];
          if (i) out += kind() == Kind::kAnd ? " & " : " | ";
          bool wrap = kind() == Kind::kAnd && c.kind() == Kind::kOr;
          out += wrap ? "(" + c.to_string() + ")" : c.to_string();
        }
        return out;
      }
    }
    return "";
  }

  friend bool operator==(const Condition& a, const Condition& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    if (a.kind() == Kind::kAtom)
      return a.lhs() == b.lhs() && a.op() == b.op() && a.rhs() == b.rhs();
    return a.children() == b.children();
  }

 private:
  struct Node {
    Kind kind = Kind::kTrue;
    Position lhs, rhs;
    CompareOp op = CompareOp::kEq;
    std::vector<Condition> children;
  };

  explicit Condition(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Condition make(Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return Condition(std::move(n));
  }

  // Nested junctions of the same kind are flattened so that printing and
  // re-parsing yield the same structure.
  static Condition junction(Kind k, std::vector<Condition> in) {
    std::vector<Condition> cs;
    for (auto& c : in) {
      if (c.kind() == k)
        cs.insert(cs.end(), c.children().begin(), c.children().end());
      else
        cs.push_back(std::move(c));
    }
    if (cs.empty()) return truth(k == Kind::kAnd);
    if (cs.size() == 1) return std::move(cs.front());
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->children = std::move(cs);
    return Condition(std::move(n));
  }

  static ValueId fetch(Position p, const Tuple& left, const Tuple& right) {
    const Tuple& t = p.side == Position::Side::kLeft ? left : right;
    if (p.index > t.size())
      throw CheckError("condition position " + p.to_string() + " out of range");
    return t[p.index - 1];
  }

  std::size_t max_index(Position::Side side) const {
    if (kind() == Kind::kAtom) {
      std::size_t m = 0;
      if (lhs().side == side) m = std::max(m, lhs().index);
      if (rhs().side == side) m = std::max(m, rhs().index);
      return m;
    }
    std::size_t m = 0;
    for (const auto& c : children()) m = std::max(m, c.max_index(side));
    return m;
  }

  void collect_pairs(std::vector<std::pair<std::size_t, std::size_t>>& out) const {
    if (kind() == Kind::kAtom) {
      if (lhs().side == Position::Side::kLeft)
        out.emplace_back(lhs().index, rhs().index);
      else
        out.emplace_back(rhs().index, lhs().index);
    }
    for (const auto& c : children()) c.collect_pairs(out);
  }

  std::shared_ptr<const Node> node_;
};

// Ω always contains equality; `order` adds the total order < (and <=).
struct Omega {
  bool order = false;

  static Omega equality() { return {false}; }
  static Omega ordered() { return {true}; }

  std::string to_string() const { return order ? "{=,<}" : "{=}"; }
  friend bool operator==(const Omega&, const Omega&) = default;
};

}  // namespace semijoin
