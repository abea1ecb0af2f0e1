#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "semijoin/condition.hpp"
#include "semijoin/parse_util.hpp"
#include "semijoin/sa.hpp"

namespace semijoin {

namespace detail {

// cond  := or
// or    := and ("|" and)*
// and   := unary ("&" unary)*
// unary := "!" unary | "(" cond ")" | "true" | "false" | pos op pos
// pos   := ("x" | "y") INT          op := "=" | "!=" | "<" | "<=" | ">" | ">="
class ConditionParser {
 public:
  explicit ConditionParser(Cursor& c) : c_(c) {}

  Condition parse() { return parse_or(); }

 private:
  Condition parse_or() {
    std::vector<Condition> parts{parse_and()};
    while (c_.accept("|")) parts.push_back(parse_and());
    return Condition::disj(std::move(parts));
  }

  Condition parse_and() {
    std::vector<Condition> parts{parse_unary()};
    while (c_.accept("&")) parts.push_back(parse_unary());
    return Condition::conj(std::move(parts));
  }

  Condition parse_unary() {
    if (c_.lookahead("!") && !c_.lookahead("!=")) {
      c_.accept("!");
      return Condition::negate(parse_unary());
    }
    if (c_.accept("(")) {
      Condition inner = parse_or();
      c_.expect(")");
      return inner;
    }
    std::string w = c_.peek_word();
    if (w == "true" || w == "false") {
      c_.identifier();
      return Condition::truth(w == "true");
    }
    Position lhs = parse_position();
    CompareOp op;
    bool swap = false;
    if (c_.accept("!=")) op = CompareOp::kNe;
    else if (c_.accept("<=")) op = CompareOp::kLe;
    else if (c_.accept(">=")) op = CompareOp::kLe, swap = true;
    else if (c_.accept("=")) op = CompareOp::kEq;
    else if (c_.accept("<")) op = CompareOp::kLt;
    else if (c_.accept(">")) op = CompareOp::kLt, swap = true;
    else c_.fail("expected a comparison operator");
    Position rhs = parse_position();
    return swap ? Condition::atom(rhs, op, lhs) : Condition::atom(lhs, op, rhs);
  }

  Position parse_position() {
    c_.skip_ws();
    std::size_t at = c_.pos();
    std::string w = c_.identifier();
    if (w.size() < 2 || (w[0] != 'x' && w[0] != 'y') ||
        w.find_first_not_of("0123456789", 1) != std::string::npos) {
      c_.reset(at);
      c_.fail("expected a position x<i> or y<j>");
    }
    std::size_t idx = std::stoul(w.substr(1));
    if (idx == 0) {
      c_.reset(at);
      c_.fail("positions are 1-based");
    }
    return w[0] == 'x' ? Position::x(idx) : Position::y(idx);
  }

  Cursor& c_;
};

class SAParser {
 public:
  explicit SAParser(std::string_view text) : c_(text) {}

  SAExpr parse() {
    SAExpr e = expr();
    if (!c_.at_end()) c_.fail("unexpected trailing input");
    return e;
  }

 private:
  SAExpr expr() {
    c_.skip_ws();
    std::size_t at = c_.pos();
    std::string kw = c_.identifier();
    if (kw == "rel") {
      std::string name = c_.identifier();
      return SAExpr::relation(name);
    }
    if (kw == "union" || kw == "diff") {
      c_.expect("(");
      SAExpr a = expr();
      c_.expect(",");
      SAExpr b = expr();
      c_.expect(")");
      return kw == "union" ? SAExpr::union_of(a, b) : SAExpr::difference(a, b);
    }
    if (kw == "select") {
      Condition cond = bracketed_condition();
      c_.expect("(");
      SAExpr a = expr();
      c_.expect(")");
      return SAExpr::select(cond, a);
    }
    if (kw == "project") {
      c_.expect("[");
      std::vector<std::size_t> idx;
      if (!c_.lookahead("]")) {
        do {
          std::size_t i = c_.integer();
          if (i == 0) c_.fail("projection indices are 1-based");
          idx.push_back(i);
        } while (c_.accept(","));
      }
      c_.expect("]");
      c_.expect("(");
      SAExpr a = expr();
      c_.expect(")");
      return SAExpr::project(std::move(idx), a);
    }
    if (kw == "semijoin") {
      Condition cond = bracketed_condition();
      c_.expect("(");
      SAExpr a = expr();
      c_.expect(",");
      SAExpr b = expr();
      c_.expect(")");
      return SAExpr::semijoin(cond, a, b);
    }
    c_.reset(at);
    c_.fail("expected rel, union, diff, select, project or semijoin");
  }

  Condition bracketed_condition() {
    c_.expect("[");
    Condition cond = ConditionParser(c_).parse();
    c_.expect("]");
    return cond;
  }

  Cursor c_;
};

}  // namespace detail

inline SAExpr parse_sa(std::string_view text) { return detail::SAParser(text).parse(); }

inline Condition parse_condition(std::string_view text) {
  detail::Cursor c(text);
  Condition cond = detail::ConditionParser(c).parse();
  if (!c.at_end()) c.fail("unexpected trailing input");
  return cond;
}

}  // namespace semijoin
