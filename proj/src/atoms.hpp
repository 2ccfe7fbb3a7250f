#pragma once

#include <cstdint>
#include <vector>

#include "charp/ratfunc.hpp"

namespace charp::detail {

// An entry written over a common coprime base: value = c * prod atoms[i]^e_i.
struct AtomPowers {
  uint32_t constant = 1;
  std::vector<std::pair<int, int64_t>> powers;  // (index into atoms, exponent)
};

struct AtomSplit {
  std::vector<RatFunc> atoms;  // monic nonconstant polynomials, pairwise coprime
  std::vector<AtomPowers> entries;
};

// Throws ZeroArgument on a zero entry.
AtomSplit split_over_coprime_base(const Context& ctx, const std::vector<RatFunc>& entries);

}  // namespace charp::detail
