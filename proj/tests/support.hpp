#pragma once

#include <random>
#include <string>
#include <vector>

#include "charp/parse.hpp"
#include "charp/ratfunc.hpp"

namespace testing_support {

using namespace charp;

inline Context make_ctx(uint32_t p, std::vector<std::string> vars) { return FieldContext::create(p, std::move(vars)); }

inline RatFunc R(const Context& ctx, std::string_view s) { return parse_ratfunc(ctx, s); }

struct Gen {
  explicit Gen(uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  // Random polynomial in the given variables with total degree <= deg.
  Poly poly(const Context& ctx, const std::vector<int>& vars, int deg, int terms) {
    uint32_t p = ctx->p();
    std::vector<Term> ts;
    for (int k = 0; k < terms; ++k) {
      Exponents e{};
      int budget = uniform(0, deg);
      for (int v : vars) {
        if (budget == 0) break;
        int d = uniform(0, budget);
        e[v] = static_cast<uint16_t>(d);
        budget -= d;
      }
      ts.push_back(Term{e, static_cast<uint32_t>(uniform(1, static_cast<int>(p) - 1))});
    }
    return Poly::from_terms(p, std::move(ts));
  }

  Poly nonzero_poly(const Context& ctx, const std::vector<int>& vars, int deg, int terms) {
    while (true) {
      Poly f = poly(ctx, vars, deg, terms);
      if (!f.is_zero()) return f;
    }
  }

  RatFunc ratfunc(const Context& ctx, const std::vector<int>& vars, int deg, int terms = 3) {
    Poly n = poly(ctx, vars, deg, terms);
    Poly d = uniform(0, 2) == 0 ? Poly::constant(ctx->p(), 1) : nonzero_poly(ctx, vars, deg, 2);
    return RatFunc::fraction(ctx, n, d);
  }

  RatFunc nonzero(const Context& ctx, const std::vector<int>& vars, int deg, int terms = 3) {
    while (true) {
      RatFunc f = ratfunc(ctx, vars, deg, terms);
      if (!f.is_zero()) return f;
    }
  }

  std::vector<int> all_vars(const Context& ctx) {
    std::vector<int> v;
    for (int i = 0; i < ctx->num_vars(); ++i) v.push_back(i);
    return v;
  }
};

}  // namespace testing_support
