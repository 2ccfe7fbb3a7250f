#include "parse_internal.hpp"

#include <cctype>

#include "charp/errors.hpp"

namespace charp::detail {

Lexer::Lexer(std::string_view text) : text_(text) {}

void Lexer::skip_ws() {
  while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
}

bool Lexer::at_end() {
  skip_ws();
  return pos_ >= text_.size();
}

char Lexer::peek() {
  skip_ws();
  return pos_ < text_.size() ? text_[pos_] : '\0';
}

bool Lexer::accept(char c) {
  if (peek() != c) return false;
  ++pos_;
  return true;
}

void Lexer::expect(char c) {
  if (!accept(c)) fail(std::string("expected '") + c + "'");
}

bool Lexer::peek_identifier() {
  char c = peek();
  return std::isalpha(static_cast<unsigned char>(c));
}

bool Lexer::peek_differential() {
  if (!peek_identifier()) return false;
  size_t at = pos_;
  std::string w = identifier();
  bool call = (w == "d" || w == "dlog") && peek() == '(';
  pos_ = at;
  return call;
}

bool Lexer::peek_integer() { return std::isdigit(static_cast<unsigned char>(peek())); }

std::string Lexer::identifier() {
  skip_ws();
  size_t start = pos_;
  if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected identifier");
  while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
  return std::string(text_.substr(start, pos_ - start));
}

int64_t Lexer::integer() {
  skip_ws();
  size_t start = pos_;
  int64_t v = 0;
  while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
    if (v > (int64_t(1) << 58)) fail("integer literal too large");
    v = v * 10 + (text_[pos_] - '0');
    ++pos_;
  }
  if (pos_ == start) fail("expected integer");
  return v;
}

void Lexer::fail(const std::string& what) const {
  throw Error(ErrorKind::Parse, what + " at position " + std::to_string(pos_));
}

ExprParser::ExprParser(Lexer& lex, const Context& ctx, const Bindings& bindings)
    : lex_(lex), ctx_(ctx), bindings_(bindings) {}

RatFunc ExprParser::expr() {
  RatFunc acc = term();
  while (true) {
    if (lex_.accept('+')) {
      acc += term();
    } else if (lex_.peek() == '-') {
      lex_.accept('-');
      acc -= term();
    } else {
      return acc;
    }
  }
}

RatFunc ExprParser::term() {
  RatFunc acc = unary();
  while (true) {
    if (lex_.peek() == '*') {
      // "f * d(g)" hands the product back to the form parser
      size_t at = lex_.pos();
      lex_.accept('*');
      if (lex_.peek_differential()) {
        lex_.set_pos(at);
        return acc;
      }
      acc *= unary();
    } else if (lex_.accept('/')) {
      size_t at = lex_.pos();
      RatFunc d = unary();
      if (d.is_zero()) throw Error(ErrorKind::DivisionByZero, "division by zero at position " + std::to_string(at));
      acc /= d;
    } else {
      return acc;
    }
  }
}

RatFunc ExprParser::unary() {
  if (lex_.accept('-')) return -unary();
  if (lex_.accept('+')) return unary();
  return power();
}

RatFunc ExprParser::power() {
  RatFunc base = atom();
  if (lex_.accept('^')) {
    bool neg = false;
    if (lex_.accept('-')) neg = true;
    else if (lex_.accept('(')) {
      neg = lex_.accept('-');
      int64_t e = lex_.integer();
      lex_.expect(')');
      return raise(base, neg ? -e : e);
    }
    int64_t e = lex_.integer();
    return raise(base, neg ? -e : e);
  }
  return base;
}

RatFunc ExprParser::raise(const RatFunc& base, int64_t e) {
  if (e < 0 && base.is_zero()) lex_.fail("negative power of zero");
  if (e > 100000 || e < -100000) lex_.fail("exponent too large");
  return base.pow(e);
}

RatFunc ExprParser::atom() {
  if (lex_.accept('(')) {
    RatFunc r = expr();
    lex_.expect(')');
    return r;
  }
  if (lex_.peek_integer()) return RatFunc::constant(ctx_, lex_.integer());
  if (lex_.peek_differential()) lex_.fail("differential operator inside a function expression");
  if (lex_.peek_identifier()) {
    std::string name = lex_.identifier();
    auto it = bindings_.find(name);
    if (it != bindings_.end()) return it->second;
    int idx = ctx_->index_of(name);
    if (idx < 0) throw Error(ErrorKind::UndeclaredVariable, "undeclared variable '" + name + "'");
    return RatFunc::variable(ctx_, idx);
  }
  lex_.fail("expected expression");
}

}  // namespace charp::detail

namespace charp {

RatFunc parse_ratfunc(const Context& ctx, std::string_view text, const Bindings& bindings) {
  detail::Lexer lex(text);
  detail::ExprParser p(lex, ctx, bindings);
  RatFunc r = p.expr();
  if (!lex.at_end()) lex.fail("unexpected trailing input");
  return r;
}

}  // namespace charp
