#pragma once

#include <string>
#include <string_view>

#include "charp/parse.hpp"

namespace charp::detail {

class Lexer {
 public:
  explicit Lexer(std::string_view text);
  bool at_end();
  char peek();
  bool accept(char c);
  void expect(char c);
  bool peek_identifier();
  bool peek_integer();
  // d( or dlog( ahead
  bool peek_differential();
  std::string identifier();
  int64_t integer();
  size_t pos() const { return pos_; }
  void set_pos(size_t p) { pos_ = p; }
  [[noreturn]] void fail(const std::string& what) const;

 private:
  void skip_ws();
  std::string_view text_;
  size_t pos_ = 0;
};

class ExprParser {
 public:
  ExprParser(Lexer& lex, const Context& ctx, const Bindings& bindings);
  RatFunc expr();
  RatFunc term();
  RatFunc unary();
  RatFunc power();
  RatFunc atom();

 private:
  RatFunc raise(const RatFunc& base, int64_t e);
  Lexer& lex_;
  const Context& ctx_;
  const Bindings& bindings_;
};

}  // namespace charp::detail
