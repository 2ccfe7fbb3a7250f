#include "charp/ratfunc.hpp"

#include "charp/errors.hpp"
#include "charp/fp.hpp"

namespace charp {

void require_same_context(const Context& a, const Context& b) {
  if (a == b) return;
  if (!a || !b || a->p() != b->p() || a->vars() != b->vars())
    throw Error(ErrorKind::ContextMismatch, "operands live in different fields");
}

void RatFunc::check_ctx(const RatFunc& o) const { require_same_context(ctx_, o.ctx_); }

RatFunc RatFunc::zero(const Context& ctx) {
  return RatFunc(ctx, Poly(ctx->p()), Poly::constant(ctx->p(), 1));
}

RatFunc RatFunc::one(const Context& ctx) { return constant(ctx, 1); }

RatFunc RatFunc::constant(const Context& ctx, int64_t c) {
  return RatFunc(ctx, Poly::constant(ctx->p(), c), Poly::constant(ctx->p(), 1));
}

RatFunc RatFunc::variable(const Context& ctx, int var) {
  if (var < 0 || var >= ctx->num_vars()) throw Error(ErrorKind::UndeclaredVariable, "variable index out of range");
  return RatFunc(ctx, Poly::variable(ctx->p(), var), Poly::constant(ctx->p(), 1));
}

RatFunc RatFunc::variable(const Context& ctx, std::string_view name) {
  return variable(ctx, ctx->index_or_throw(name));
}

RatFunc RatFunc::from_poly(const Context& ctx, Poly num) {
  return RatFunc(ctx, std::move(num), Poly::constant(ctx->p(), 1));
}

RatFunc RatFunc::fraction(const Context& ctx, Poly num, Poly den) {
  uint32_t p = ctx->p();
  if (den.is_zero()) throw Error(ErrorKind::DivisionByZero, "division by the zero function");
  if (num.is_zero()) return zero(ctx);
  if (!den.is_constant()) {
    Poly g = gcd(num, den);
    if (!g.is_one()) {
      num = divide_or_throw(num, g);
      den = divide_or_throw(den, g);
    }
  }
  uint32_t lc = den.leading_coeff();
  if (lc != 1) {
    uint32_t li = fp::inv(lc, p);
    num = num.scale(li);
    den = den.scale(li);
  }
  return RatFunc(ctx, std::move(num), std::move(den));
}

uint32_t RatFunc::constant_value() const {
  if (!is_constant()) throw Error(ErrorKind::InternalLimit, "constant_value of a non-constant function");
  return num_.constant_value();
}

RatFunc RatFunc::operator-() const { return RatFunc(ctx_, -num_, den_); }

RatFunc RatFunc::operator+(const RatFunc& o) const {
  check_ctx(o);
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (den_.is_one() && o.den_.is_one()) return RatFunc(ctx_, num_ + o.num_, den_);
  if (den_ == o.den_) return fraction(ctx_, num_ + o.num_, den_);
  if (o.den_.is_one()) return RatFunc(ctx_, num_ + o.num_ * den_, den_);
  if (den_.is_one()) return RatFunc(ctx_, o.num_ + num_ * o.den_, o.den_);
  Poly g = gcd(den_, o.den_);
  if (g.is_one()) return RatFunc(ctx_, num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  Poly b1 = divide_or_throw(den_, g);
  Poly d1 = divide_or_throw(o.den_, g);
  Poly n = num_ * d1 + o.num_ * b1;
  if (n.is_zero()) return zero(ctx_);
  // n is coprime to b1 and d1; only factors of g can cancel.
  Poly h = gcd(n, g);
  if (!h.is_one()) {
    n = divide_or_throw(n, h);
    g = divide_or_throw(g, h);
  }
  Poly d = b1 * d1 * g;
  uint32_t lc = d.leading_coeff();
  if (lc != 1) {
    uint32_t li = fp::inv(lc, prime());
    n = n.scale(li);
    d = d.scale(li);
  }
  return RatFunc(ctx_, std::move(n), std::move(d));
}

RatFunc RatFunc::operator-(const RatFunc& o) const { return *this + (-o); }

RatFunc RatFunc::operator*(const RatFunc& o) const {
  check_ctx(o);
  if (is_zero() || o.is_zero()) return zero(ctx_);
  if (den_.is_one() && o.den_.is_one()) return RatFunc(ctx_, num_ * o.num_, den_);
  Poly a = num_, b = den_, c = o.num_, d = o.den_;
  if (!d.is_one()) {
    Poly g = gcd(a, d);
    if (!g.is_one()) {
      a = divide_or_throw(a, g);
      d = divide_or_throw(d, g);
    }
  }
  if (!b.is_one()) {
    Poly g = gcd(c, b);
    if (!g.is_one()) {
      c = divide_or_throw(c, g);
      b = divide_or_throw(b, g);
    }
  }
  Poly n = a * c, den = b * d;
  uint32_t lc = den.leading_coeff();
  if (lc != 1) {
    uint32_t li = fp::inv(lc, prime());
    n = n.scale(li);
    den = den.scale(li);
  }
  return RatFunc(ctx_, std::move(n), std::move(den));
}

RatFunc RatFunc::inverse() const {
  if (is_zero()) throw Error(ErrorKind::DivisionByZero, "inverse of the zero function");
  uint32_t li = fp::inv(num_.leading_coeff(), prime());
  return RatFunc(ctx_, den_.scale(li), num_.scale(li));
}

RatFunc RatFunc::operator/(const RatFunc& o) const {
  check_ctx(o);
  return *this * o.inverse();
}

RatFunc RatFunc::scale(int64_t c) const {
  uint32_t v = fp::reduce(c, prime());
  if (v == 0) return zero(ctx_);
  return RatFunc(ctx_, num_.scale(v), den_);
}

RatFunc RatFunc::pow(int64_t k) const {
  if (k < 0) return inverse().pow(-k);
  if (k == 0) return one(ctx_);
  // Powers of a reduced fraction stay reduced, and monic powers stay monic.
  return RatFunc(ctx_, num_.pow(static_cast<unsigned>(k)), den_.pow(static_cast<unsigned>(k)));
}

RatFunc RatFunc::frobenius() const { return RatFunc(ctx_, num_.frobenius(), den_.frobenius()); }

RatFunc RatFunc::derivative(int var) const {
  if (den_.is_one()) return RatFunc(ctx_, num_.derivative(var), den_);
  Poly n = num_.derivative(var) * den_ - num_ * den_.derivative(var);
  return fraction(ctx_, std::move(n), den_ * den_);
}

namespace {

// Returns b^deg * f(a/b) as a polynomial, f viewed in var.
Poly eval_homog(const Poly& f, int var, const Poly& a, const Poly& b, int deg) {
  auto coeffs = f.coefficients_in(var);
  uint32_t p = f.prime();
  if (coeffs.empty()) return Poly(p);
  int d = static_cast<int>(coeffs.size()) - 1;
  // acc_k = sum_{j>=k} c_j a^(j-k) b^(d-j), built top-down.
  Poly acc = coeffs[d];
  for (int k = d - 1; k >= 0; --k) acc = acc * a + coeffs[k] * b.pow(static_cast<unsigned>(d - k));
  if (deg > d) acc = acc * b.pow(static_cast<unsigned>(deg - d));
  return acc;
}

}  // namespace

RatFunc RatFunc::substitute(int var, const RatFunc& value) const {
  check_ctx(value);
  if (!involves(var)) return *this;
  const Poly& a = value.num_;
  const Poly& b = value.den_;
  if (b.is_one()) {
    auto ev = [&](const Poly& f) {
      auto coeffs = f.coefficients_in(var);
      Poly acc(f.prime());
      for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) acc = acc * a + coeffs[k];
      return acc;
    };
    return fraction(ctx_, ev(num_), ev(den_));
  }
  int dn = num_.degree(var), dd = den_.degree(var);
  int d = std::max(dn, dd);
  // Both sides are scaled by b^d.
  Poly n = eval_homog(num_, var, a, b, d);
  Poly den = eval_homog(den_, var, a, b, d);
  return fraction(ctx_, std::move(n), std::move(den));
}

int RatFunc::compare(const RatFunc& o) const {
  int c = num_.compare(o.num_);
  return c != 0 ? c : den_.compare(o.den_);
}

std::string RatFunc::to_string() const {
  std::string n = num_.to_string(*ctx_);
  if (den_.is_one()) return n;
  std::string d = den_.to_string(*ctx_);
  if (num_.size() > 1) n = "(" + n + ")";
  if (den_.size() > 1 || __builtin_popcount(den_.var_mask()) > 1 || den_.leading_coeff() != 1) d = "(" + d + ")";
  return n + "/" + d;
}

}  // namespace charp
