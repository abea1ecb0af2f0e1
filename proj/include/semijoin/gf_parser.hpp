#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "semijoin/gf.hpp"
#include "semijoin/parse_util.hpp"

namespace semijoin {

namespace detail {

// formula := implies ("<->" implies)*
// implies := or ("->" implies)?
// or      := and ("|" and)*
// and     := unary ("&" unary)*
// unary   := "!" unary | "(" formula ")" | "true" | "false"
//          | "exists" VAR ("," VAR)* "(" NAME "(" vars ")" ["&" formula] ")"
//          | NAME "(" vars ")" | VAR ("=" | "!=") VAR
class GFParser {
 public:
  explicit GFParser(std::string_view text) : c_(text) {}

  Formula parse() {
    Formula f = formula();
    if (!c_.at_end()) c_.fail("unexpected trailing input");
    return f;
  }

 private:
  Formula formula() {
    Formula f = implication();
    while (c_.accept("<->")) f = Formula::iff(f, implication());
    return f;
  }

  Formula implication() {
    Formula f = disjunction();
    if (c_.accept("->")) return Formula::implies(f, implication());
    return f;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (c_.accept("|")) f = Formula::disj(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (c_.accept("&")) f = Formula::conj(f, unary());
    return f;
  }

  Formula unary() {
    if (c_.lookahead("!") && !c_.lookahead("!=")) {
      c_.accept("!");
      return Formula::negate(unary());
    }
    if (c_.accept("(")) {
      Formula f = formula();
      c_.expect(")");
      return f;
    }
    c_.skip_ws();
    std::size_t at = c_.pos();
    std::string word = c_.identifier();
    if (word == "true" || word == "false") return Formula::truth(word == "true");
    if (word == "exists") {
      std::vector<std::string> bound;
      do bound.push_back(variable());
      while (c_.accept(","));
      c_.expect("(");
      c_.skip_ws();
      std::size_t guard_at = c_.pos();
      std::string name = c_.identifier();
      if (!c_.lookahead("(")) {
        c_.reset(guard_at);
        c_.fail("quantifier guard must be a relation atom");
      }
      Formula guard = atom_args(name);
      Formula body = c_.accept("&") ? formula() : Formula::truth(true);
      c_.expect(")");
      return Formula::exists(std::move(bound), guard, body);
    }
    if (is_reserved_word(word) && word != "rel") {
      c_.reset(at);
      c_.fail("unexpected keyword '" + word + "'");
    }
    if (c_.lookahead("(")) return atom_args(word);
    if (c_.accept("!=")) return Formula::negate(Formula::eq(word, variable()));
    if (c_.accept("=")) return Formula::eq(word, variable());
    c_.fail("expected '(', '=' or '!=' after '" + word + "'");
  }

  Formula atom_args(const std::string& name) {
    c_.expect("(");
    std::vector<std::string> vars;
    if (!c_.lookahead(")")) {
      do vars.push_back(variable());
      while (c_.accept(","));
    }
    c_.expect(")");
    return Formula::rel(name, std::move(vars));
  }

  std::string variable() {
    c_.skip_ws();
    std::size_t at = c_.pos();
    std::string v = c_.identifier();
    if (v == "exists" || v == "true" || v == "false") {
      c_.reset(at);
      c_.fail("keyword '" + v + "' used as a variable");
    }
    return v;
  }

  Cursor c_;
};

}  // namespace detail

inline Formula parse_gf(std::string_view text) { return detail::GFParser(text).parse(); }

}  // namespace semijoin
