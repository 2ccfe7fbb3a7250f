#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "charp/poly.hpp"

namespace charp {

// Sparse multivariate polynomial over Z, used for the universal Witt tables.
class ZPoly {
 public:
  ZPoly() = default;
  static ZPoly constant(const mpz_class& c);
  static ZPoly variable(int var, unsigned power = 1);

  const std::map<Exponents, mpz_class>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  ZPoly operator+(const ZPoly& o) const;
  ZPoly operator-(const ZPoly& o) const;
  ZPoly operator-() const;
  ZPoly operator*(const ZPoly& o) const;
  ZPoly scale(const mpz_class& c) const;
  ZPoly pow(unsigned k) const;
  // Exact division of every coefficient; throws InternalLimit if inexact.
  ZPoly divexact(const mpz_class& c) const;

  mpz_class evaluate(const std::vector<mpz_class>& point) const;
  Poly reduce_mod(uint32_t p) const;

  bool operator==(const ZPoly& o) const { return terms_ == o.terms_; }

  std::string serialize() const;
  static ZPoly deserialize(const std::string& text);

 private:
  void add_term(const Exponents& e, const mpz_class& c);
  std::map<Exponents, mpz_class> terms_;
};

}  // namespace charp
