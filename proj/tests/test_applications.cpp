#include "doctest.h"
#include "support.hpp"

#include <array>

#include "charp/applications.hpp"
#include "charp/errors.hpp"

using namespace testing_support;

namespace {

// Textbook integer formulas evaluated at a point, reduced mod p afterwards.
struct IntWeierstrass {
  __int128 b2, b4, b6, b8, c4, c6, delta;
};

IntWeierstrass int_weierstrass(const std::array<int64_t, 5>& a) {
  __int128 a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a6 = a[4];
  IntWeierstrass w{};
  w.b2 = a1 * a1 + 4 * a2;
  w.b4 = 2 * a4 + a1 * a3;
  w.b6 = a3 * a3 + 4 * a6;
  w.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  w.c4 = w.b2 * w.b2 - 24 * w.b4;
  w.c6 = -w.b2 * w.b2 * w.b2 + 36 * w.b2 * w.b4 - 216 * w.b6;
  w.delta = -w.b2 * w.b2 * w.b8 - 8 * w.b4 * w.b4 * w.b4 - 27 * w.b6 * w.b6 + 9 * w.b2 * w.b4 * w.b6;
  return w;
}

uint32_t mod(__int128 x, uint32_t p) {
  __int128 r = x % p;
  return static_cast<uint32_t>(r < 0 ? r + p : r);
}

uint32_t eval(RatFunc f, const std::array<int64_t, 5>& pt) {
  for (int i = 0; i < 5; ++i) f = f.substitute(i, RatFunc::constant(f.ctx(), pt[i]));
  return f.constant_value();
}

Context acontext(uint32_t p) { return make_ctx(p, {"a1", "a2", "a3", "a4", "a6"}); }

std::vector<RatFunc> E(const Context& ctx, std::vector<std::string> xs) {
  std::vector<RatFunc> out;
  for (const auto& s : xs) out.push_back(R(ctx, s));
  return out;
}

WittVector slot(const Context& ctx, int r, int k) {
  std::vector<RatFunc> c(r, RatFunc::zero(ctx));
  c[k] = RatFunc::one(ctx);
  return WittVector(ctx, c);
}

}  // namespace

TEST_CASE("applications: Weierstrass quantities agree with integer evaluation") {
  Gen g(11);
  for (uint32_t p : {2u, 3u, 5u, 7u}) {
    auto ctx = acontext(p);
    WeierstrassData w = weierstrass_quantities(weierstrass_variables(ctx));
    for (int it = 0; it < 40; ++it) {
      std::array<int64_t, 5> pt{};
      for (auto& x : pt) x = g.uniform(-20, 20);
      IntWeierstrass o = int_weierstrass(pt);
      CHECK(eval(w.b2, pt) == mod(o.b2, p));
      CHECK(eval(w.b4, pt) == mod(o.b4, p));
      CHECK(eval(w.b6, pt) == mod(o.b6, p));
      CHECK(eval(w.b8, pt) == mod(o.b8, p));
      CHECK(eval(w.c4, pt) == mod(o.c4, p));
      CHECK(eval(w.c6, pt) == mod(o.c6, p));
      CHECK(eval(w.delta, pt) == mod(o.delta, p));
      // integer identities hold before reduction
      CHECK(4 * o.b8 == o.b2 * o.b6 - o.b4 * o.b4);
      CHECK(1728 * o.delta == o.c4 * o.c4 * o.c4 - o.c6 * o.c6);
    }
  }
}

TEST_CASE("applications: the identities catch a4 in b2 and -36 in c6") {
  auto c3 = acontext(3);
  auto a = weierstrass_variables(c3);
  WeierstrassData w = weierstrass_quantities(a);
  RatFunc bad_b2 = a[0] * a[0] + a[3].scale(4);
  CHECK(w.b8.scale(4) == w.b2 * w.b6 - w.b4 * w.b4);
  CHECK(w.b8.scale(4) != bad_b2 * w.b6 - w.b4 * w.b4);

  auto c5 = acontext(5);
  WeierstrassData w5 = weierstrass_quantities(weierstrass_variables(c5));
  RatFunc bad_c6 = -w5.b2.pow(3) - (w5.b2 * w5.b4).scale(36) - w5.b6.scale(216);
  CHECK(w5.delta.scale(1728) == w5.c4.pow(3) - w5.c6 * w5.c6);
  CHECK(w5.delta.scale(1728) != w5.c4.pow(3) - bad_c6 * bad_c6);
  // the two c6 agree in characteristics 2 and 3
  for (uint32_t p : {2u, 3u}) {
    WeierstrassData wp = weierstrass_quantities(weierstrass_variables(acontext(p)));
    CHECK(wp.c6 == -wp.b2.pow(3) - (wp.b2 * wp.b4).scale(36) - wp.b6.scale(216));
  }
}

TEST_CASE("applications: characteristic 2 discriminant and coordinates") {
  auto ctx = acontext(2);
  auto a = weierstrass_variables(ctx);
  WeierstrassData w = weierstrass_quantities(a);
  CHECK(w.delta == R(ctx, "a1^4*a2*a3^2 + a1^3*a3^3 + a3^4 + a1^5*a3*a4 + a1^4*a4^2 + a1^6*a6"));
  CHECK(w.j() == R(ctx, "a1^12") / w.delta);
  Char2Coordinates c = char2_coordinates(a);
  CHECK(c.a2p == R(ctx, "(a1*a2 + a3)/a1^3"));
  CHECK(c.a6p * w.j() == RatFunc::one(ctx));

  std::array<RatFunc, 5> s{RatFunc::one(ctx), a[1], a[2], a[3], a[4]};
  CHECK(char2_coordinates(s).a2p == a[1] + a[2]);
}

TEST_CASE("applications: characteristic 3 discriminant") {
  auto ctx = acontext(3);
  WeierstrassData w = weierstrass_quantities(weierstrass_variables(ctx));
  CHECK(w.delta == -w.b2.pow(3) * w.b6 + w.b2.pow(2) * w.b4.pow(2) + w.b4.pow(3));
  CHECK(w.j() == w.b2.pow(6) / w.delta);
}

TEST_CASE("applications: errors") {
  auto c3 = acontext(3);
  auto a3 = weierstrass_variables(c3);
  auto kind = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InternalLimit;
  };
  CHECK(kind([&] { char2_coordinates(a3); }) == ErrorKind::WrongCharacteristic);
  CHECK(kind([&] { alpha_class(c3, 1); }) == ErrorKind::WrongCharacteristic);

  auto c2 = acontext(2);
  auto a2 = weierstrass_variables(c2);
  a2[0] = RatFunc::zero(c2);
  CHECK(kind([&] { char2_coordinates(a2); }) == ErrorKind::A1Zero);

  std::array<RatFunc, 5> z{RatFunc::zero(c2), RatFunc::zero(c2), RatFunc::zero(c2), RatFunc::zero(c2),
                           RatFunc::zero(c2)};
  CHECK(kind([&] { weierstrass_quantities(z).j(); }) == ErrorKind::ZeroDiscriminant);

  auto cx = make_ctx(2, {"x"});
  CHECK(kind([&] { mu_map(KSymbolSum::symbol(cx, 4, E(cx, {"x"})), 2); }) == ErrorKind::ModulusMismatch);
  CHECK(kind([&] { verify_battery("nope", 1); }) == ErrorKind::Unsupported);
  CHECK(kind([&] { verify_battery("charp", 1, 0, 3); }) == ErrorKind::WrongCharacteristic);
  CHECK(kind([&] { verify_battery("mod-ell", 0, 4, 2); }) == ErrorKind::ModulusMismatch);
}

TEST_CASE("applications: alpha class and mu") {
  auto ctx = make_ctx(2, {"x", "a2", "a3", "a4", "a6", "a1"});
  HSymbolSum al = alpha_class(ctx, 3);
  REQUIRE(al.size() == 1);
  const WittVector& w = al.terms().begin()->second;
  CHECK(w[0].is_zero());
  CHECK(w[1].is_zero());
  CHECK(w[2] == R(ctx, "(a1*a2 + a3)/a1^3"));

  HSymbolSum m = mu_map(KSymbolSum::symbol(ctx, 2, E(ctx, {"x", "a4"})), 2);
  CHECK(m == HSymbolSum::symbol(slot(ctx, 2, 1), E(ctx, {"x", "a4"})));
}

TEST_CASE("applications: J-group membership") {
  auto ctx = make_ctx(2, {"x", "t"});
  auto x = E(ctx, {"x"});
  auto x1 = E(ctx, {"x + 1"});
  SUBCASE("r <= 2 reduces to mu(y) = 0") {
    for (int r : {1, 2}) {
      HSymbolSum w = HSymbolSum::symbol(slot(ctx, r, 0), x1);
      CHECK(j_group_check({w, KSymbolSum::symbol(ctx, 2, E(ctx, {"x^2"}))}).status == Status::Zero);
      CHECK(j_group_check({w, KSymbolSum::symbol(ctx, 2, x)}).status == Status::NonZero);
    }
  }
  SUBCASE("r = 3") {
    HSymbolSum w = HSymbolSum::symbol(slot(ctx, 3, 0), x);
    CHECK(j_group_check({w, KSymbolSum::symbol(ctx, 2, x)}).status == Status::Zero);
    CHECK(j_group_check({w, KSymbolSum::symbol(ctx, 2, x1)}).status == Status::NonZero);
  }
  SUBCASE("r = 4 sees 8 w") {
    HSymbolSum w = HSymbolSum::symbol(slot(ctx, 4, 0), x);
    CHECK(j_group_check({w, KSymbolSum::symbol(ctx, 2, x)}).status == Status::NonZero);
    HSymbolSum w1 = HSymbolSum::symbol(slot(ctx, 4, 1), x);
    CHECK(j_group_check({w1, KSymbolSum::symbol(ctx, 2, x)}).status == Status::Zero);
    Verdict v = h_is_zero(w.scale(8));
    CHECK(v.status == Status::NonZero);
    CHECK(h_verify(w.scale(8), v));
  }
}

TEST_CASE("applications: descent along t -> t + s^p - s") {
  for (uint32_t p : {2u, 3u}) {
    auto ctx = make_ctx(p, {"x", "s", "t"});
    int t = ctx->index_of("t"), s = ctx->index_of("s");
    CHECK(bzp_descent_check(HSymbolSum::symbol(R(ctx, "t"), E(ctx, {"x"})), t, s).status == Status::Zero);
    CHECK(bzp_descent_check(HSymbolSum::symbol(R(ctx, "t*x"), {}), t, s).status == Status::NonZero);
    CHECK(bzp_descent_check(HSymbolSum::symbol(R(ctx, "x^2"), E(ctx, {"x + 1"})), t, s).status == Status::Zero);
  }
}

TEST_CASE("applications: property: t dlog g and t-free classes descend") {
  Gen g(23);
  int decided = 0;
  for (int it = 0; it < 100; ++it) {
    uint32_t p = it % 2 ? 3 : 2;
    auto ctx = make_ctx(p, {"x", "s", "t"});
    int t = ctx->index_of("t"), s = ctx->index_of("s");
    RatFunc gx = g.nonzero(ctx, {0}, 3);
    RatFunc f = g.nonzero(ctx, {0}, 2);
    Verdict a = bzp_descent_check(HSymbolSum::symbol(R(ctx, "t"), {gx}), t, s);
    Verdict b = bzp_descent_check(HSymbolSum::symbol(f, {gx}), t, s);
    CHECK(a.status != Status::NonZero);
    CHECK(b.status == Status::Zero);
    if (a.status == Status::Zero) ++decided;
  }
  CHECK(decided >= 90);
}

TEST_CASE("applications: property: a6' j = 1 at random points in characteristic 2") {
  Gen g(5);
  auto ctx = make_ctx(2, {"x", "y"});
  for (int it = 0; it < 100; ++it) {
    std::array<RatFunc, 5> a;
    for (auto& c : a) c = g.ratfunc(ctx, {0, 1}, 2);
    if (a[0].is_zero()) a[0] = R(ctx, "x");
    WeierstrassData w = weierstrass_quantities(a);
    if (w.delta.is_zero()) continue;
    Char2Coordinates c = char2_coordinates(a);
    CHECK(c.a6p * w.j() == RatFunc::one(ctx));
    CHECK(c.a2p * a[0].pow(3) == a[0] * a[1] + a[2]);
  }
}

TEST_CASE("applications: batteries pass") {
  struct Run {
    std::string battery;
    int r;
    uint64_t ell;
    uint32_t p;
  };
  std::vector<Run> runs{{"char2", 1, 0, 0}, {"char2", 2, 0, 0}, {"char2", 3, 0, 0}, {"char2", 4, 0, 0},
                        {"char3", 1, 0, 0}, {"char3", 2, 0, 0}, {"charp", 1, 0, 5}, {"charp", 2, 0, 7},
                        {"kcoeff", 1, 0, 2}, {"kcoeff", 3, 0, 2}, {"kcoeff", 2, 0, 3}, {"kcoeff", 1, 0, 5},
                        {"mod-ell", 0, 3, 2}, {"mod-ell", 0, 5, 2}, {"mod-ell", 0, 2, 3}, {"mod-ell", 0, 4, 3},
                        {"bzp", 1, 0, 2}, {"bzp", 1, 0, 3}};
  for (const auto& run : runs) {
    VerificationReport rep = verify_battery(run.battery, run.r, run.ell, run.p);
    INFO(rep.to_string());
    CHECK(rep.all_passed());
    CHECK(rep.checks.size() >= 2);
  }
}
