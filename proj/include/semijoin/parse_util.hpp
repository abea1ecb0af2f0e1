#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "semijoin/error.hpp"

namespace semijoin::detail {

// Character cursor shared by the SA and GF parsers.
class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  bool lookahead(std::string_view token) {
    skip_ws();
    return text_.substr(pos_, token.size()) == token;
  }

  bool accept(std::string_view token) {
    if (!lookahead(token)) return false;
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  bool peek_identifier() {
    skip_ws();
    return pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_');
  }

  std::string identifier() {
    if (!peek_identifier()) fail("expected an identifier");
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // Reads an identifier without consuming it.
  std::string peek_word() {
    std::size_t save = pos_;
    std::string w = peek_identifier() ? identifier() : std::string();
    pos_ = save;
    return w;
  }

  std::size_t integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return std::stoul(std::string(text_.substr(start, pos_ - start)));
  }

  std::size_t pos() const { return pos_; }
  void reset(std::size_t p) { pos_ = p; }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what, line, column);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace semijoin::detail
