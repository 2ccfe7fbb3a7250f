#pragma once

#include <cstdint>
#include <string>

#include "charp/context.hpp"
#include "charp/poly.hpp"

namespace charp {

// Element of F_p(x_1, ..., x_m) stored as a reduced fraction with a monic
// denominator (leading coefficient 1 in lex order).
class RatFunc {
 public:
  RatFunc() = default;

  static RatFunc zero(const Context& ctx);
  static RatFunc one(const Context& ctx);
  static RatFunc constant(const Context& ctx, int64_t c);
  static RatFunc variable(const Context& ctx, int var);
  static RatFunc variable(const Context& ctx, std::string_view name);
  static RatFunc from_poly(const Context& ctx, Poly num);
  // Reduces num/den; throws DivisionByZero when den = 0.
  static RatFunc fraction(const Context& ctx, Poly num, Poly den);
  // Caller guarantees gcd(num, den) = 1 and den monic.
  static RatFunc from_reduced(const Context& ctx, Poly num, Poly den) {
    return RatFunc(ctx, std::move(num), std::move(den));
  }

  const Context& ctx() const { return ctx_; }
  uint32_t prime() const { return ctx_->p(); }
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }
  bool is_poly() const { return den_.is_one(); }
  // 0 for the zero function; throws for non-constants.
  uint32_t constant_value() const;
  uint32_t var_mask() const { return num_.var_mask() | den_.var_mask(); }
  bool involves(int var) const { return num_.involves(var) || den_.involves(var); }

  RatFunc operator-() const;
  RatFunc operator+(const RatFunc& o) const;
  RatFunc operator-(const RatFunc& o) const;
  RatFunc operator*(const RatFunc& o) const;
  RatFunc operator/(const RatFunc& o) const;
  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }
  RatFunc scale(int64_t c) const;
  RatFunc inverse() const;
  RatFunc pow(int64_t k) const;
  RatFunc frobenius() const;
  RatFunc derivative(int var) const;

  // Replace x_var by value. Throws DivisionByZero if the denominator vanishes.
  RatFunc substitute(int var, const RatFunc& value) const;

  bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RatFunc& o) const { return !(*this == o); }
  int compare(const RatFunc& o) const;
  bool operator<(const RatFunc& o) const { return compare(o) < 0; }
  size_t hash() const { return num_.hash() * 31 + den_.hash(); }

  std::string to_string() const;

 private:
  RatFunc(Context ctx, Poly num, Poly den) : ctx_(std::move(ctx)), num_(std::move(num)), den_(std::move(den)) {}
  void check_ctx(const RatFunc& o) const;

  Context ctx_;
  Poly num_;
  Poly den_;
};

void require_same_context(const Context& a, const Context& b);

}  // namespace charp
