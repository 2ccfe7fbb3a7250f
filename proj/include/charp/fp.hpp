#pragma once

#include <cstdint>

// Arithmetic in the prime field Z/p with p < 2^31.
namespace charp::fp {

inline uint32_t reduce(int64_t a, uint32_t p) {
  int64_t r = a % static_cast<int64_t>(p);
  return static_cast<uint32_t>(r < 0 ? r + p : r);
}

inline uint32_t add(uint32_t a, uint32_t b, uint32_t p) {
  uint32_t s = a + b;
  return s >= p ? s - p : s;
}

inline uint32_t sub(uint32_t a, uint32_t b, uint32_t p) { return a >= b ? a - b : a + p - b; }

inline uint32_t neg(uint32_t a, uint32_t p) { return a == 0 ? 0 : p - a; }

inline uint32_t mul(uint32_t a, uint32_t b, uint32_t p) {
  return static_cast<uint32_t>(static_cast<uint64_t>(a) * b % p);
}

inline uint32_t pow(uint32_t a, uint64_t e, uint32_t p) {
  uint64_t r = 1 % p, b = a % p;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return static_cast<uint32_t>(r);
}

// a must be nonzero mod p.
inline uint32_t inv(uint32_t a, uint32_t p) { return pow(a, p - 2, p); }

bool is_prime(uint64_t n);

// Smallest generator of the multiplicative group of F_p.
uint32_t primitive_root(uint32_t p);

// Discrete logarithm of a (nonzero) to the base primitive_root(p).
uint32_t discrete_log(uint32_t a, uint32_t p);

}  // namespace charp::fp
