#pragma once

#include <memory>
#include <string>
#include <vector>

#include "charp/ratfunc.hpp"
#include "charp/zpoly.hpp"

namespace charp {

inline constexpr int kMaxWittLength = 8;

// Universal sum, product and negation polynomials for W_r over Z.
// Variables: X_i has index i, Y_i has index r + i.
struct WittTables {
  uint32_t p = 0;
  int r = 0;
  std::vector<ZPoly> sum, prod, neg;
  std::vector<Poly> sum_mod_p, prod_mod_p, neg_mod_p;

  // Cached per (p, r); honours CHARP_TABLE_CACHE for an on-disk copy.
  static std::shared_ptr<const WittTables> get(uint32_t p, int r);
  static WittTables build(uint32_t p, int r);
};

// Ghost polynomial w_n(Z_offset, ..., Z_offset+n) over Z.
ZPoly ghost_polynomial(uint32_t p, int n, int offset);

class WittVector {
 public:
  WittVector() = default;
  WittVector(Context ctx, std::vector<RatFunc> components);
  static WittVector zero(const Context& ctx, int r);
  static WittVector one(const Context& ctx, int r);
  // Teichmuller representative [a] = (a, 0, ..., 0).
  static WittVector teichmuller(const RatFunc& a, int r);

  const Context& ctx() const { return ctx_; }
  int length() const { return static_cast<int>(c_.size()); }
  const RatFunc& operator[](int i) const { return c_.at(i); }
  const std::vector<RatFunc>& components() const { return c_; }
  bool is_zero() const;
  // Index of the first nonzero component, or length() when zero.
  int leading_zeros() const;

  bool operator==(const WittVector& o) const { return c_ == o.c_; }
  bool operator!=(const WittVector& o) const { return !(*this == o); }
  int compare(const WittVector& o) const;
  size_t hash() const;
  std::string to_string() const;

 private:
  Context ctx_;
  std::vector<RatFunc> c_;
};

enum class WittEngine { Auto, Tables, GhostLift };

WittVector witt_add(const WittVector& a, const WittVector& b, WittEngine engine = WittEngine::Auto);
WittVector witt_neg(const WittVector& a, WittEngine engine = WittEngine::Auto);
WittVector witt_sub(const WittVector& a, const WittVector& b, WittEngine engine = WittEngine::Auto);
WittVector witt_mul(const WittVector& a, const WittVector& b, WittEngine engine = WittEngine::Auto);
// k * a for an integer k (any sign).
WittVector witt_scalar(int64_t k, const WittVector& a);
WittVector witt_frobenius(const WittVector& a);
// V(a_1..a_r) = (0, a_1..a_{r-1}), same length.
WittVector witt_verschiebung(const WittVector& a);
// Length-s vector placed in the last s slots of a length-r vector.
WittVector witt_shift_iota(const WittVector& a, int r);
// Keeps the first r - s slots.
WittVector witt_truncate_pi(const WittVector& a, int s);
// p * a = (0, a_1^p, ..., a_{r-1}^p).
WittVector witt_pmul(const WittVector& a);

}  // namespace charp
