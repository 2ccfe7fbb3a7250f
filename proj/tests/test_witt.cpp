#include "doctest.h"
#include "support.hpp"

#include "charp/errors.hpp"
#include "charp/witt.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace testing_support;

namespace {

WittVector W(const Context& ctx, std::vector<std::string> comps) {
  std::vector<RatFunc> c;
  for (const auto& s : comps) c.push_back(R(ctx, s));
  return WittVector(ctx, std::move(c));
}

WittVector random_witt(Gen& g, const Context& ctx, const std::vector<int>& vars, int r, int deg) {
  std::vector<RatFunc> c;
  for (int i = 0; i < r; ++i) {
    // Mix polynomial and rational components, with some zeros.
    int kind = g.uniform(0, 5);
    if (kind == 0) c.push_back(RatFunc::zero(ctx));
    else if (kind == 1) c.push_back(g.nonzero(ctx, vars, deg, 2));
    else c.push_back(RatFunc::from_poly(ctx, g.poly(ctx, vars, deg, 3)));
  }
  return WittVector(ctx, std::move(c));
}

// Sum_i p^i Z_i^(p^(n-i)) applied to a list of polynomials.
ZPoly ghost_of(uint32_t p, const std::vector<ZPoly>& z, int n) {
  ZPoly acc;
  mpz_class pi = 1;
  for (int i = 0; i <= n; ++i) {
    unsigned e = 1;
    for (int k = i; k < n; ++k) e *= p;
    acc = acc + z[i].pow(e).scale(pi);
    pi *= p;
  }
  return acc;
}

}  // namespace

TEST_CASE("witt addition examples") {
  auto ctx = make_ctx(2, {"x", "y", "a", "b"});
  CHECK(witt_add(W(ctx, {"1", "0"}), W(ctx, {"1", "0"})) == W(ctx, {"0", "1"}));
  CHECK(witt_add(W(ctx, {"a", "b"}), W(ctx, {"0", "0"})) == W(ctx, {"a", "b"}));
  // S_1 from the ghost recursion: (X^2 + Y^2 - (X + Y)^2) / 2 = -XY.
  ZPoly X = ZPoly::variable(0), Y = ZPoly::variable(1);
  ZPoly s1 = (X.pow(2) + Y.pow(2) - (X + Y).pow(2)).divexact(2);
  CHECK(s1 == (X * Y).scale(-1));
  CHECK(witt_add(W(ctx, {"x", "0"}), W(ctx, {"y", "0"})) == W(ctx, {"x + y", "x*y"}));
}

TEST_CASE("witt multiplication examples") {
  auto ctx = make_ctx(2, {"a", "b"});
  CHECK(witt_mul(W(ctx, {"1", "0"}), W(ctx, {"a", "b"})) == W(ctx, {"a", "b"}));
  CHECK(witt_mul(W(ctx, {"0", "1"}), W(ctx, {"0", "1"})) == W(ctx, {"0", "0"}));
  CHECK(witt_mul(W(ctx, {"0", "0", "0"}), W(ctx, {"a", "b", "a*b"})).is_zero());
  auto c3 = make_ctx(3, {"a", "b"});
  CHECK(witt_mul(WittVector::one(c3, 3), W(c3, {"a", "b", "a/b"})) == W(c3, {"a", "b", "a/b"}));
}

TEST_CASE("frobenius, shifts and p-multiplication") {
  for (uint32_t p : {2u, 3u, 5u}) {
    auto ctx = make_ctx(p, {"x", "y"});
    WittVector v = W(ctx, {"x", "y"});
    RatFunc x = R(ctx, "x"), y = R(ctx, "y");
    CHECK(witt_frobenius(v) == WittVector(ctx, {x.pow(p), y.pow(p)}));
    CHECK(witt_frobenius(WittVector::zero(ctx, 3)).is_zero());
    WittVector abc = W(ctx, {"x", "y", "x*y"});
    CHECK(witt_shift_iota(W(ctx, {"x"}), 3) == W(ctx, {"0", "0", "x"}));
    CHECK(witt_truncate_pi(abc, 1) == W(ctx, {"x", "y"}));
    CHECK(witt_truncate_pi(witt_shift_iota(W(ctx, {"x", "y"}), 3), 2).is_zero());
    CHECK(witt_pmul(abc) == WittVector(ctx, {RatFunc::zero(ctx), x.pow(p), y.pow(p)}));
    CHECK(witt_pmul(WittVector::zero(ctx, 2)).is_zero());
    CHECK_THROWS_AS(witt_truncate_pi(abc, 3), Error);
    CHECK_THROWS_AS(witt_add(abc, v), Error);
  }
  auto c3 = make_ctx(3, {"x"});
  WittVector one = W(c3, {"1", "0"});
  WittVector three = witt_add(witt_add(one, one), one);
  CHECK(three == W(c3, {"0", "1"}));
  CHECK(three == witt_pmul(one));
}

TEST_CASE("ghost identities hold exactly over Z") {
  for (uint32_t p : {2u, 3u, 5u}) {
    for (int r = 1; r <= 4; ++r) {
      auto t = WittTables::get(p, r);
      std::vector<ZPoly> X, Y;
      for (int i = 0; i < r; ++i) {
        X.push_back(ZPoly::variable(i));
        Y.push_back(ZPoly::variable(r + i));
      }
      for (int n = 0; n < r; ++n) {
        ZPoly wx = ghost_of(p, X, n), wy = ghost_of(p, Y, n);
        CHECK(ghost_of(p, t->sum, n) == wx + wy);
        CHECK(ghost_of(p, t->prod, n) == wx * wy);
        CHECK(ghost_of(p, t->neg, n) == -wx);
      }
    }
  }
}

TEST_CASE("ghost identities at random integer points") {
  Gen g(21);
  for (uint32_t p : {2u, 3u, 7u}) {
    for (int r = 1; r <= 3; ++r) {
      auto t = WittTables::get(p, r);
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<mpz_class> pt(2 * r);
        for (auto& v : pt) v = g.uniform(-50, 50);
        std::vector<mpz_class> s, m;
        for (int n = 0; n < r; ++n) {
          s.push_back(t->sum[n].evaluate(pt));
          m.push_back(t->prod[n].evaluate(pt));
        }
        for (int n = 0; n < r; ++n) {
          auto ghost = [&](auto get) {
            mpz_class acc = 0, pi = 1, pw;
            for (int i = 0; i <= n; ++i) {
              unsigned long e = 1;
              for (int k = i; k < n; ++k) e *= p;
              mpz_pow_ui(pw.get_mpz_t(), get(i).get_mpz_t(), e);
              acc += pi * pw;
              pi *= p;
            }
            return acc;
          };
          mpz_class wx = ghost([&](int i) { return pt[i]; });
          mpz_class wy = ghost([&](int i) { return pt[r + i]; });
          CHECK(ghost([&](int i) { return s[i]; }) == wx + wy);
          CHECK(ghost([&](int i) { return m[i]; }) == wx * wy);
        }
      }
    }
  }
}

TEST_CASE("table and ghost-lift evaluation agree") {
  Gen g(22);
  for (uint32_t p : {2u, 3u, 5u}) {
    auto ctx = make_ctx(p, {"x", "y"});
    for (int r = 1; r <= 3; ++r) {
      for (int i = 0; i < 15; ++i) {
        WittVector a = random_witt(g, ctx, {0, 1}, r, 3), b = random_witt(g, ctx, {0, 1}, r, 3);
        CHECK(witt_add(a, b, WittEngine::Tables) == witt_add(a, b, WittEngine::GhostLift));
        CHECK(witt_mul(a, b, WittEngine::Tables) == witt_mul(a, b, WittEngine::GhostLift));
        CHECK(witt_neg(a, WittEngine::Tables) == witt_neg(a, WittEngine::GhostLift));
      }
    }
  }
}

TEST_CASE("scalar multiples match repeated addition") {
  Gen g(23);
  for (uint32_t p : {2u, 3u}) {
    auto ctx = make_ctx(p, {"x", "y"});
    for (int i = 0; i < 20; ++i) {
      WittVector a = random_witt(g, ctx, {0, 1}, 3, 2);
      WittVector acc = WittVector::zero(ctx, 3);
      for (int k = 1; k <= 5; ++k) {
        acc = witt_add(acc, a);
        CHECK(witt_scalar(k, a) == acc);
      }
      CHECK(witt_scalar(-1, a) == witt_neg(a));
      CHECK(witt_add(witt_scalar(-3, a), witt_scalar(3, a)).is_zero());
    }
  }
}

TEST_CASE("ring axioms on random vectors") {
  Gen g(24);
  for (uint32_t p : {2u, 3u, 5u}) {
    auto ctx = make_ctx(p, {"x", "y"});
    for (int i = 0; i < 40; ++i) {
      int r = 1 + i % 4;
      // Large p and r blow up degrees as p^r; keep those univariate and polynomial.
      bool small = p == 2 || r <= 2 || (p == 3 && r == 3);
      std::vector<int> vars = small ? std::vector<int>{0, 1} : std::vector<int>{0};
      auto rnd = [&] {
        if (small) return random_witt(g, ctx, vars, r, 4);
        std::vector<RatFunc> c;
        for (int k = 0; k < r; ++k) c.push_back(RatFunc::from_poly(ctx, g.poly(ctx, vars, 4, 3)));
        return WittVector(ctx, c);
      };
      WittVector a = rnd(), b = rnd(), c = rnd();
      CHECK(witt_add(witt_add(a, b), c) == witt_add(a, witt_add(b, c)));
      CHECK(witt_add(a, b) == witt_add(b, a));
      CHECK(witt_add(a, witt_neg(a)).is_zero());
      CHECK(witt_mul(a, b) == witt_mul(b, a));
      CHECK(witt_mul(witt_mul(a, b), c) == witt_mul(a, witt_mul(b, c)));
      CHECK(witt_mul(a, witt_add(b, c)) == witt_add(witt_mul(a, b), witt_mul(a, c)));
      CHECK(witt_pmul(a) == witt_scalar(p, a));
      CHECK(witt_frobenius(witt_add(a, b)) == witt_add(witt_frobenius(a), witt_frobenius(b)));
    }
  }
}

TEST_CASE("table cache directory") {
  // primes unused elsewhere, so the in-process map has not seen them
  std::string dir = "charp_cache_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directory(dir);
  setenv("CHARP_TABLE_CACHE", dir.c_str(), 1);
  auto t13 = WittTables::get(13, 2);
  std::ifstream in(dir + "/witt_p13_r2.tbl");
  std::string magic;
  uint32_t p = 0;
  int r = 0;
  in >> magic >> p >> r;
  CHECK(magic == "charp-witt-v1");
  CHECK(p == 13);
  CHECK(r == 2);

  // a corrupted file is detected and rebuilt: S_1 with one coefficient changed
  WittTables good = WittTables::build(11, 2);
  WittTables bad = good;
  bad.sum[1] = bad.sum[1] + ZPoly::variable(0);
  {
    std::ofstream out(dir + "/witt_p11_r2.tbl");
    out << "charp-witt-v1 11 2\n";
    for (const auto* vec : {&bad.sum, &bad.prod, &bad.neg})
      for (const auto& z : *vec) out << z.serialize();
  }
  auto t11 = WittTables::get(11, 2);
  CHECK(t11->sum[1] == good.sum[1]);
  unsetenv("CHARP_TABLE_CACHE");
  std::filesystem::remove_all(dir);
}
