#include "charp/errors.hpp"
#include "parse_internal.hpp"

namespace charp {

namespace {

using detail::ExprParser;
using detail::Lexer;

struct Parser {
  Parser(std::string_view text, const Context& c, const Bindings& b) : lex(text), ctx(c), expr(lex, c, b) {}
  Lexer lex;
  const Context& ctx;
  ExprParser expr;

  void finish() {
    if (!lex.at_end()) lex.fail("unexpected trailing input");
  }

  // Leading sign of a summand; true when negative.
  bool sign() {
    bool neg = false;
    while (true) {
      if (lex.accept('-')) neg = !neg;
      else if (!lex.accept('+')) return neg;
    }
  }

  std::vector<RatFunc> list(char close) {
    std::vector<RatFunc> out;
    if (lex.peek() == close) return out;
    out.push_back(expr.expr());
    while (lex.accept(',')) out.push_back(expr.expr());
    return out;
  }

  // Optional "k*" in front of a bracket; returns 1 when absent.
  int64_t multiplier(char open) {
    if (!lex.peek_integer()) return 1;
    size_t at = lex.pos();
    int64_t k = lex.integer();
    if (lex.accept('*') && lex.peek() == open) return k;
    lex.set_pos(at);
    return 1;
  }

  WittVector witt() {
    lex.expect('[');
    std::vector<RatFunc> c = list(']');
    lex.expect(']');
    if (c.empty()) lex.fail("empty Witt vector");
    return WittVector(ctx, std::move(c));
  }

  DiffForm differential() {
    std::string w = lex.identifier();
    lex.expect('(');
    RatFunc f = expr.expr();
    lex.expect(')');
    if (w == "d") return form_d(f);
    if (f.is_zero()) lex.fail("dlog of zero");
    return form_d(f) * f.inverse();
  }

  DiffForm wedge_chain() {
    DiffForm acc = differential();
    while (lex.accept('^')) {
      if (!lex.peek_differential()) lex.fail("expected d( or dlog( after '^'");
      acc = wedge(acc, differential());
    }
    return acc;
  }

  DiffForm form_term() {
    bool neg = sign();
    DiffForm t;
    if (lex.peek_differential()) {
      t = wedge_chain();
    } else {
      RatFunc c = expr.term();
      t = lex.accept('*') ? c * wedge_chain() : DiffForm::function(c);
    }
    return neg ? -t : t;
  }

  DiffForm form() {
    DiffForm acc = form_term();
    while (lex.peek() == '+' || lex.peek() == '-') {
      DiffForm t = form_term();
      if (t.degree() != acc.degree()) throw Error(ErrorKind::LengthMismatch, "summands of different degree");
      acc += t;
    }
    return acc;
  }
};

}  // namespace

WittVector parse_witt(const Context& ctx, std::string_view text, const Bindings& bindings) {
  Parser p(text, ctx, bindings);
  WittVector w = p.witt();
  p.finish();
  return w;
}

DiffForm parse_form(const Context& ctx, std::string_view text, const Bindings& bindings) {
  Parser p(text, ctx, bindings);
  DiffForm w = p.form();
  p.finish();
  return w;
}

KSymbolSum parse_ksym(const Context& ctx, std::string_view text, uint64_t modulus, const Bindings& bindings) {
  Parser p(text, ctx, bindings);
  struct Item {
    std::vector<RatFunc> e;
    int64_t c;
  };
  std::vector<Item> items;
  do {
    bool neg = p.sign();
    int64_t k = p.multiplier('{');
    if (p.lex.accept('{')) {
      std::vector<RatFunc> e = p.list('}');
      p.lex.expect('}');
      items.push_back({std::move(e), neg ? -k : k});
    } else {
      int64_t c = p.lex.integer();
      items.push_back({{}, neg ? -c : c});
    }
  } while (p.lex.peek() == '+' || p.lex.peek() == '-');
  if (p.lex.accept('@')) {
    int64_t m = p.lex.integer();
    if (m < 2) p.lex.fail("modulus must be at least 2");
    modulus = static_cast<uint64_t>(m);
  }
  p.finish();
  const size_t degree = items.front().e.size();
  KSymbolSum s(ctx, static_cast<int>(degree), modulus);
  for (auto& it : items) {
    if (it.e.size() != degree) throw Error(ErrorKind::LengthMismatch, "symbols of different degree");
    s.add(std::move(it.e), it.c);
  }
  return s;
}

HSymbolSum parse_hsym(const Context& ctx, std::string_view text, int length, const Bindings& bindings) {
  Parser p(text, ctx, bindings);
  if (p.lex.peek() == '0') {
    size_t at = p.lex.pos();
    if (p.lex.integer() == 0 && p.lex.at_end()) return HSymbolSum(ctx, 0, length);
    p.lex.set_pos(at);
  }
  struct Item {
    WittVector w;
    std::vector<RatFunc> e;
    int64_t c;
  };
  std::vector<Item> items;
  do {
    bool neg = p.sign();
    int64_t k = p.multiplier('[');
    p.lex.expect('[');
    std::vector<RatFunc> c = p.list('|');
    if (c.empty()) p.lex.fail("empty Witt part");
    std::vector<RatFunc> e;
    if (p.lex.accept('|')) {
      e = p.list('}');
      p.lex.expect('}');
      if (e.empty()) p.lex.fail("empty symbol after '|'");
    } else {
      p.lex.expect(']');
    }
    items.push_back({WittVector(ctx, std::move(c)), std::move(e), neg ? -k : k});
  } while (p.lex.peek() == '+' || p.lex.peek() == '-');
  p.finish();
  HSymbolSum s(ctx, static_cast<int>(items.front().e.size()), items.front().w.length());
  for (auto& it : items) s.add(it.w, std::move(it.e), it.c);
  return s;
}

DivisorValuation parse_valuation(const Context& ctx, std::string_view text, const Bindings& bindings) {
  Parser p(text, ctx, bindings);
  size_t at = p.lex.pos();
  std::string head = p.lex.identifier();
  if ((head == "inf" || head == "poly") && p.lex.accept('(')) {
    if (head == "inf") {
      std::string var = p.lex.identifier();
      p.lex.expect(')');
      p.finish();
      return DivisorValuation::at_infinity(ctx, ctx->index_or_throw(var));
    }
    RatFunc f = p.expr.expr();
    p.lex.expect(',');
    std::string var = p.lex.identifier();
    p.lex.expect(')');
    p.finish();
    return place_of_polynomial(f, ctx->index_or_throw(var));
  }
  int var = ctx->index_of(head);
  if (var < 0) {
    p.lex.set_pos(at);
    p.lex.fail("expected a variable, inf(...) or poly(...)");
  }
  p.lex.expect('=');
  RatFunc c = p.expr.expr();
  p.finish();
  if (c.involves(var)) throw Error(ErrorKind::InvalidContext, "center involves " + head);
  if (c.is_constant()) return DivisorValuation::at(ctx, var, c.constant_value());
  return DivisorValuation::at_function(var, c);
}

std::pair<std::string, RatFunc> parse_binding(const Context& ctx, std::string_view text, const Bindings& bindings) {
  Parser p(text, ctx, bindings);
  std::string name = p.lex.identifier();
  if (ctx->index_of(name) >= 0) throw Error(ErrorKind::InvalidContext, "binding shadows variable '" + name + "'");
  if (name == "d" || name == "dlog" || name == "inf" || name == "poly")
    throw Error(ErrorKind::InvalidContext, "'" + name + "' is reserved");
  p.lex.expect('=');
  RatFunc v = p.expr.expr();
  p.finish();
  return {name, v};
}

}  // namespace charp
