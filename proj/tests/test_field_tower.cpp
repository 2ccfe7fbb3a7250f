#include "doctest.h"
#include "support.hpp"

#include "charp/errors.hpp"
#include "charp/valuation.hpp"
#include "../src/poly_gcd.hpp"

using namespace testing_support;

namespace {

// Plain Euclid over F_p[x] on dense coefficient vectors (low degree first).
std::vector<uint32_t> dense_gcd(std::vector<uint32_t> a, std::vector<uint32_t> b, uint32_t p) {
  auto trim = [](std::vector<uint32_t>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
  };
  auto inv = [p](uint32_t x) {
    uint64_t r = 1, b = x;
    for (uint64_t e = p - 2; e; e >>= 1, b = b * b % p)
      if (e & 1) r = r * b % p;
    return static_cast<uint32_t>(r);
  };
  trim(a);
  trim(b);
  while (!b.empty()) {
    while (a.size() >= b.size()) {
      uint32_t c = static_cast<uint32_t>(uint64_t(a.back()) * inv(b.back()) % p);
      size_t shift = a.size() - b.size();
      for (size_t i = 0; i < b.size(); ++i) a[i + shift] = (a[i + shift] + p - uint64_t(c) * b[i] % p) % p;
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  if (!a.empty()) {
    uint32_t c = inv(a.back());
    for (auto& x : a) x = static_cast<uint32_t>(uint64_t(x) * c % p);
  }
  return a;
}

std::vector<uint32_t> to_dense(const Poly& f, int var) {
  std::vector<uint32_t> out(std::max(f.degree(var) + 1, 0), 0);
  for (const auto& t : f.terms()) out[t.exp[var]] = t.coeff;
  return out;
}

}  // namespace

TEST_CASE("normalization examples") {
  auto ctx = make_ctx(2, {"a1", "a2", "a3", "a4", "a6"});
  CHECK(R(ctx, "a1^2 - a1^2").is_zero());
  RatFunc alpha = R(ctx, "(a1*a2 + a3)/a1^3");
  CHECK(alpha.den() == Poly::variable(2, 0, 3));
  CHECK(alpha.num() == R(ctx, "a1*a2 + a3").num());
  CHECK(R(ctx, "(a1*a2*a1 + a3*a1)/a1^4") == alpha);
  RatFunc delta = R(ctx, "a1^4*a2*a3^2 + a1^3*a3^3 + a3^4 + a1^5*a3*a4 + a1^4*a4^2 + a1^6*a6");
  CHECK(delta.is_poly());
  CHECK(delta.num().size() == 6);
  CHECK(R(ctx, "a1^2 - a1^2") == RatFunc::zero(ctx));
}

TEST_CASE("denominators are monic and reduced") {
  auto ctx = make_ctx(5, {"x", "y"});
  RatFunc f = R(ctx, "(2*x + 4)/(3*x^2 - 12)");
  CHECK(f.den().leading_coeff() == 1);
  CHECK(f == R(ctx, "4/(x - 2)"));
  CHECK_THROWS_AS(R(ctx, "x/(y - y)"), Error);
  try {
    R(ctx, "x + z");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndeclaredVariable);
  }
}

TEST_CASE("gcd agrees with dense Euclid on univariate inputs") {
  auto ctx = make_ctx(3, {"x"});
  Gen g(11);
  for (int i = 0; i < 200; ++i) {
    Poly a = g.poly(ctx, {0}, 6, 4), b = g.poly(ctx, {0}, 6, 4), c = g.poly(ctx, {0}, 3, 3);
    Poly A = a * c, B = b * c;
    Poly G = gcd(A, B);
    CHECK(to_dense(G, 0) == dense_gcd(to_dense(A, 0), to_dense(B, 0), 3));
  }
}

TEST_CASE("multivariate gcd divides and contains common factors") {
  auto ctx = make_ctx(2, {"x", "y", "z"});
  Gen g(12);
  for (int i = 0; i < 150; ++i) {
    Poly a = g.nonzero_poly(ctx, {0, 1, 2}, 4, 3), b = g.nonzero_poly(ctx, {0, 1, 2}, 4, 3);
    Poly c = g.nonzero_poly(ctx, {0, 1, 2}, 3, 3);
    Poly G = gcd(a * c, b * c);
    REQUIRE(divide_exact(a * c, G).has_value());
    REQUIRE(divide_exact(b * c, G).has_value());
    CHECK(divide_exact(G, c.monic()).has_value());
  }
}

TEST_CASE("modular gcd matches the PRS reference") {
  for (uint32_t p : {2u, 3u, 5u, 7u, 65537u}) {
    auto ctx = make_ctx(p, {"x", "y", "z", "w"});
    Gen g(13 + p);
    for (int i = 0; i < 60; ++i) {
      std::vector<int> vars = i % 2 ? std::vector<int>{0, 1, 2, 3} : std::vector<int>{0, 1};
      Poly a = g.nonzero_poly(ctx, vars, 3, 3), b = g.nonzero_poly(ctx, vars, 3, 3);
      Poly c = g.nonzero_poly(ctx, vars, 3, 3);
      Poly G = gcd(a * c, b * c);
      CHECK(G == charp::detail::prs_gcd_reference(a * c, b * c));
      CHECK(G == charp::detail::prs_gcd_reference(b * c, a * c));
    }
  }
}

TEST_CASE("rational function field axioms") {
  auto ctx = make_ctx(3, {"x", "y"});
  Gen g(13);
  auto vars = g.all_vars(ctx);
  for (int i = 0; i < 100; ++i) {
    RatFunc a = g.ratfunc(ctx, vars, 3), b = g.ratfunc(ctx, vars, 3), c = g.nonzero(ctx, vars, 3);
    CHECK((a + b) * c == a * c + b * c);
    CHECK((a * b) / c * c == a * b);
    CHECK(a - a == RatFunc::zero(ctx));
    CHECK((a + b).frobenius() == a.frobenius() + b.frobenius());
    CHECK((a * b).derivative(0) == a.derivative(0) * b + a * b.derivative(0));
  }
}

TEST_CASE("valuation examples") {
  auto ctx = make_ctx(2, {"a1", "a2", "a3", "a4", "a6"});
  RatFunc delta = R(ctx, "a1^4*a2*a3^2 + a1^3*a3^3 + a3^4 + a1^5*a3*a4 + a1^4*a4^2 + a1^6*a6");
  auto v = DivisorValuation::at(ctx, "a1", 0);
  CHECK(rf_valuation(R(ctx, "a1^12") / delta, v) == 12);
  CHECK(rf_reduce(delta, v) == RatFunc::from_poly(ctx, delta.num().evaluate(0, 0)));
  CHECK(rf_reduce(delta, v) == R(ctx, "a3^4"));

  auto ct = make_ctx(3, {"x", "t"});
  auto vt = DivisorValuation::at(ct, "t", 0);
  auto vinf = DivisorValuation::at_infinity(ct, "t");
  CHECK(rf_valuation(RatFunc::one(ct), vt) == 0);
  CHECK(rf_valuation(R(ct, "t"), vinf) == -1);
  CHECK(rf_reduce(R(ct, "2"), vt) == R(ct, "2"));
  CHECK(rf_reduce(R(ct, "t + x"), vt) == R(ct, "x"));
  CHECK(rf_reduce(R(ct, "(x*t^2 + 1)/(t^2 + t)"), vinf) == R(ct, "x"));
  CHECK_THROWS_AS(rf_valuation(RatFunc::zero(ct), vt), Error);
  CHECK_THROWS_AS(rf_reduce(R(ct, "1/t"), vt), Error);
}

TEST_CASE("valuation is a discrete valuation and reduction is a ring map") {
  auto ctx = make_ctx(3, {"x", "t"});
  Gen g(14);
  auto vars = g.all_vars(ctx);
  std::vector<DivisorValuation> places = {DivisorValuation::at(ctx, 1, 0), DivisorValuation::at(ctx, 1, 2),
                                          DivisorValuation::at(ctx, 0, 1), DivisorValuation::at_infinity(ctx, 1),
                                          DivisorValuation::at_function(1, R(ctx, "x"))};
  for (int i = 0; i < 200; ++i) {
    RatFunc f = g.nonzero(ctx, vars, 3), h = g.nonzero(ctx, vars, 3);
    for (const auto& v : places) {
      int a = rf_valuation(f, v), b = rf_valuation(h, v);
      CHECK(rf_valuation(f * h, v) == a + b);
      if (!(f + h).is_zero()) {
        int c = rf_valuation(f + h, v);
        CHECK(c >= std::min(a, b));
        if (a != b) CHECK(c == std::min(a, b));
      }
      if (a >= 0 && b >= 0) {
        CHECK(rf_reduce(f * h, v) == rf_reduce(f, v) * rf_reduce(h, v));
        CHECK(rf_reduce(f + h, v) == rf_reduce(f, v) + rf_reduce(h, v));
        CHECK(!rf_reduce(f, v).involves(v.var()));
      }
    }
  }
}

TEST_CASE("laurent coefficients recompose the principal part") {
  auto ctx = make_ctx(5, {"x", "t"});
  Gen g(15);
  auto vars = g.all_vars(ctx);
  RatFunc t = R(ctx, "t");
  for (int i = 0; i < 50; ++i) {
    RatFunc f = g.nonzero(ctx, vars, 3) / t.pow(g.uniform(0, 3));
    int val = local_valuation(f, 1);
    auto co = laurent_coefficients(f, 1, val, 2);
    RatFunc partial = RatFunc::zero(ctx);
    for (int k = val; k <= 2; ++k) partial += co[k - val] * t.pow(k);
    RatFunc rest = f - partial;
    CHECK((rest.is_zero() || local_valuation(rest, 1) >= 3));
    for (const auto& c : co) CHECK(!c.involves(1));
  }
}

TEST_CASE("frobenius decomposition") {
  auto c2 = make_ctx(2, {"x"});
  auto d = rf_frobenius_decompose(R(c2, "x^3"));
  REQUIRE(d.size() == 1);
  CHECK(d.begin()->first[0] == 1);
  CHECK(d.begin()->second == R(c2, "x"));
  auto d2 = rf_frobenius_decompose(R(c2, "1/x"));
  REQUIRE(d2.size() == 1);
  CHECK(d2.begin()->first[0] == 1);
  CHECK(d2.begin()->second == R(c2, "1/x"));

  auto c3 = make_ctx(3, {"x", "y"});
  auto d3 = rf_frobenius_decompose(R(c3, "x^2*y^4"));
  REQUIRE(d3.size() == 1);
  CHECK(d3.begin()->first[0] == 2);
  CHECK(d3.begin()->first[1] == 1);
  CHECK(d3.begin()->second == R(c3, "y"));

  Gen g(16);
  for (uint32_t p : {2u, 3u, 5u}) {
    auto ctx = make_ctx(p, {"x", "y"});
    for (int i = 0; i < 40; ++i) {
      RatFunc f = g.ratfunc(ctx, g.all_vars(ctx), 4);
      auto parts = rf_frobenius_decompose(f);
      CHECK(rf_frobenius_recompose(ctx, parts) == f);
      for (const auto& [e, h] : parts)
        for (int k = 0; k < kMaxVars; ++k) CHECK(e[k] < p);
    }
  }
}

TEST_CASE("Artin-Schreier examples") {
  for (uint32_t p : {2u, 3u, 5u}) {
    auto ctx = make_ctx(p, {"x", "t"});
    RatFunc x = R(ctx, "x"), t = R(ctx, "t");
    auto g1 = solve_artin_schreier(x.pow(p) - x);
    REQUIRE(g1.has_value());
    CHECK((*g1 - x).is_constant());
    auto g2 = solve_artin_schreier(t.pow(-static_cast<int>(p)) - t.inverse());
    REQUIRE(g2.has_value());
    CHECK((*g2 - t.inverse()).is_constant());
    CHECK_FALSE(solve_artin_schreier(t.inverse()).has_value());
  }
}

TEST_CASE("t^-1 has no Artin-Schreier root among low pole order candidates") {
  // Exhaustive: g = a/t + b0 + b1 t + b2 t^2 over F_p.
  for (uint32_t p : {2u, 3u}) {
    auto ctx = make_ctx(p, {"t"});
    RatFunc t = R(ctx, "t");
    bool found = false;
    for (uint32_t a = 0; a < p; ++a)
      for (uint32_t b0 = 0; b0 < p; ++b0)
        for (uint32_t b1 = 0; b1 < p; ++b1)
          for (uint32_t b2 = 0; b2 < p; ++b2) {
            RatFunc g = t.inverse().scale(a) + RatFunc::constant(ctx, b0) + t.scale(b1) + t.pow(2).scale(b2);
            if (g.pow(p) - g == t.inverse()) found = true;
          }
    CHECK_FALSE(found);
    CHECK_FALSE(solve_artin_schreier(t.inverse()).has_value());
  }
}

TEST_CASE("Artin-Schreier solver recovers random solutions") {
  Gen g(17);
  for (uint32_t p : {2u, 3u, 5u}) {
    auto ctx = make_ctx(p, {"x", "t"});
    for (int i = 0; i < 40; ++i) {
      RatFunc h = g.ratfunc(ctx, g.all_vars(ctx), 2, 2);
      RatFunc f = h.pow(p) - h;
      auto sol = solve_artin_schreier(f);
      REQUIRE(sol.has_value());
      CHECK(sol->pow(p) - *sol == f);
      CHECK((*sol - h).is_constant());
      // Adding a simple pole breaks solvability.
      RatFunc pole = R(ctx, "1/(t - 1)");
      if (f.is_zero() || rf_valuation(f, DivisorValuation::at(ctx, 1, 1)) >= 0)
        CHECK_FALSE(solve_artin_schreier(f + pole).has_value());
    }
  }
}
