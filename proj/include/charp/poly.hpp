#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "charp/context.hpp"

namespace charp {

using Exponents = std::array<uint16_t, kMaxVars>;

struct Term {
  Exponents exp{};
  uint32_t coeff = 0;
};

Exponents exp_add(const Exponents& a, const Exponents& b);
bool exp_divides(const Exponents& a, const Exponents& b);
Exponents exp_sub(const Exponents& a, const Exponents& b);

// Sparse polynomial over F_p. Terms are kept sorted by decreasing lex order
// with nonzero coefficients, so equality is structural.
class Poly {
 public:
  Poly() = default;
  explicit Poly(uint32_t p) : p_(p) {}

  static Poly constant(uint32_t p, int64_t c);
  static Poly monomial(uint32_t p, const Exponents& e, uint32_t c = 1);
  static Poly variable(uint32_t p, int var, unsigned power = 1);
  // Terms in any order; duplicates are combined.
  static Poly from_terms(uint32_t p, std::vector<Term> terms);

  uint32_t prime() const { return p_; }
  const std::vector<Term>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  bool is_monomial() const { return terms_.size() == 1; }
  uint32_t constant_value() const;
  const Term& leading() const { return terms_.front(); }
  uint32_t leading_coeff() const { return terms_.empty() ? 0 : terms_.front().coeff; }

  int degree(int var) const;
  int min_degree(int var) const;
  int total_degree() const;
  uint32_t var_mask() const;
  bool involves(int var) const;

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly scale(uint32_t c) const;
  Poly mul_monomial(const Exponents& e, uint32_t c) const;
  Poly pow(unsigned k) const;
  // f(x)^p computed by Frobenius on exponents.
  Poly frobenius() const;
  Poly derivative(int var) const;
  Poly evaluate(int var, uint32_t c) const;
  Poly monic() const;
  // gcd of all exponent vectors (the largest monomial dividing every term)
  Exponents monomial_content() const;

  // Coefficients with respect to var: result[k] is free of var.
  std::vector<Poly> coefficients_in(int var) const;
  static Poly from_coefficients(uint32_t p, const std::vector<Poly>& coeffs, int var);

  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }
  // Total order used for canonical sorting.
  int compare(const Poly& o) const;
  size_t hash() const;

  std::string to_string(const FieldContext& ctx) const;

 private:
  uint32_t p_ = 2;
  std::vector<Term> terms_;
  friend class PolyBuilder;
};

std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
Poly divide_or_throw(const Poly& a, const Poly& b);
// Monic gcd; gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);
// Content with respect to var (gcd of the coefficients), monic.
Poly content_in(const Poly& a, int var);
// If every exponent is divisible by p the polynomial is a p-th power.
std::optional<Poly> pth_root(const Poly& a);

}  // namespace charp
