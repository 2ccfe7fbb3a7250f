#include "charp/fp.hpp"

#include <vector>

#include "charp/errors.hpp"

namespace charp::fp {

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

uint32_t primitive_root(uint32_t p) {
  if (p == 2) return 1;
  std::vector<uint32_t> factors;
  uint32_t m = p - 1;
  for (uint32_t d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      factors.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) factors.push_back(m);
  for (uint32_t g = 2; g < p; ++g) {
    bool ok = true;
    for (uint32_t q : factors)
      if (pow(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw Error(ErrorKind::InvalidContext, "no primitive root");
}

uint32_t discrete_log(uint32_t a, uint32_t p) {
  a %= p;
  if (a == 0) throw Error(ErrorKind::ZeroArgument, "discrete log of 0");
  uint32_t g = primitive_root(p);
  uint32_t x = 1;
  for (uint32_t k = 0; k < p - 1; ++k) {
    if (x == a) return k;
    x = mul(x, g, p);
  }
  throw Error(ErrorKind::InternalLimit, "discrete log not found");
}

}  // namespace charp::fp
