#include "charp/witt.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "charp/errors.hpp"
#include "charp/fp.hpp"

namespace charp {

// ---------------------------------------------------------------- tables

ZPoly ghost_polynomial(uint32_t p, int n, int offset) {
  ZPoly w;
  mpz_class pi = 1;
  unsigned e = 1;
  for (int k = 0; k < n; ++k) e *= p;
  for (int i = 0; i <= n; ++i) {
    w = w + ZPoly::variable(offset + i, e).scale(pi);
    pi *= p;
    e /= p;
  }
  return w;
}

namespace {

// Components c_n solving w_n(c) = ghost[n] over Z.
std::vector<ZPoly> components_from_ghost_z(uint32_t p, const std::vector<ZPoly>& ghost) {
  std::vector<ZPoly> c;
  for (size_t n = 0; n < ghost.size(); ++n) {
    ZPoly acc = ghost[n];
    mpz_class pi = 1;
    for (size_t i = 0; i < n; ++i) {
      unsigned e = 1;
      for (size_t k = i; k < n; ++k) e *= p;
      acc = acc - c[i].pow(e).scale(pi);
      pi *= p;
    }
    c.push_back(acc.divexact(pi));
  }
  return c;
}

std::string cache_path(uint32_t p, int r) {
  const char* dir = std::getenv("CHARP_TABLE_CACHE");
  if (!dir || !*dir) return {};
  return std::string(dir) + "/witt_p" + std::to_string(p) + "_r" + std::to_string(r) + ".tbl";
}

bool load_tables(const std::string& path, WittTables& t) {
  std::ifstream in(path);
  if (!in) return false;
  std::string magic;
  uint32_t p;
  int r;
  if (!(in >> magic >> p >> r) || magic != "charp-witt-v1" || p != t.p || r != t.r) return false;
  std::string line, block;
  std::getline(in, line);
  auto read_poly = [&](ZPoly& out) {
    size_t n;
    std::streampos start = in.tellg();
    if (!(in >> n)) return false;
    in.seekg(start);
    std::ostringstream os;
    std::getline(in, line);
    os << line << '\n';
    for (size_t k = 0; k < n; ++k) {
      if (!std::getline(in, line)) return false;
      os << line << '\n';
    }
    out = ZPoly::deserialize(os.str());
    return true;
  };
  for (auto* vec : {&t.sum, &t.prod, &t.neg}) {
    vec->resize(r);
    for (auto& z : *vec)
      if (!read_poly(z)) return false;
  }
  return true;
}

// w_n at an integer point, entries point[offset .. offset + n].
mpz_class ghost_at(uint32_t p, const std::vector<mpz_class>& v, int n) {
  mpz_class acc = 0, pi = 1, pw;
  for (int i = 0; i <= n; ++i) {
    unsigned long e = 1;
    for (int k = i; k < n; ++k) e *= p;
    mpz_pow_ui(pw.get_mpz_t(), v[i].get_mpz_t(), e);
    acc += pi * pw;
    pi *= p;
  }
  return acc;
}

// A file from the cache directory is checked against the ghost identities at
// a few integer points before use.
bool spot_check(const WittTables& t) {
  const int r = t.r;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<mpz_class> pt(2 * r);
    for (int i = 0; i < 2 * r; ++i) pt[i] = (7 * trial + 3 * i + 2) % 9 - 4;
    std::vector<mpz_class> x(pt.begin(), pt.begin() + r), y(pt.begin() + r, pt.end()), s, m, n;
    for (int k = 0; k < r; ++k) {
      s.push_back(t.sum[k].evaluate(pt));
      m.push_back(t.prod[k].evaluate(pt));
      n.push_back(t.neg[k].evaluate(pt));
    }
    for (int k = 0; k < r; ++k) {
      mpz_class wx = ghost_at(t.p, x, k), wy = ghost_at(t.p, y, k);
      if (ghost_at(t.p, s, k) != wx + wy || ghost_at(t.p, m, k) != wx * wy || ghost_at(t.p, n, k) != -wx)
        return false;
    }
  }
  return true;
}

void store_tables(const std::string& path, const WittTables& t) {
  std::string tmp = path + ".tmp" + std::to_string(reinterpret_cast<uintptr_t>(&t));
  std::ofstream out(tmp);
  if (!out) return;
  out << "charp-witt-v1 " << t.p << ' ' << t.r << '\n';
  for (const auto* vec : {&t.sum, &t.prod, &t.neg})
    for (const auto& z : *vec) out << z.serialize();
  out.close();
  if (out) std::rename(tmp.c_str(), path.c_str());
  else std::remove(tmp.c_str());
}

void reduce_tables(WittTables& t) {
  for (const auto& z : t.sum) t.sum_mod_p.push_back(z.reduce_mod(t.p));
  for (const auto& z : t.prod) t.prod_mod_p.push_back(z.reduce_mod(t.p));
  for (const auto& z : t.neg) t.neg_mod_p.push_back(z.reduce_mod(t.p));
}

}  // namespace

WittTables WittTables::build(uint32_t p, int r) {
  if (r < 1 || r > kMaxWittLength) throw Error(ErrorKind::ResourceLimit, "Witt length must be between 1 and 8");
  WittTables t;
  t.p = p;
  t.r = r;
  std::vector<ZPoly> gs, gp, gn;
  for (int n = 0; n < r; ++n) {
    ZPoly wx = ghost_polynomial(p, n, 0), wy = ghost_polynomial(p, n, r);
    gs.push_back(wx + wy);
    gp.push_back(wx * wy);
    gn.push_back(-wx);
  }
  t.sum = components_from_ghost_z(p, gs);
  t.prod = components_from_ghost_z(p, gp);
  t.neg = components_from_ghost_z(p, gn);
  reduce_tables(t);
  return t;
}

std::shared_ptr<const WittTables> WittTables::get(uint32_t p, int r) {
  static std::mutex mu;
  static std::map<std::pair<uint32_t, int>, std::shared_ptr<const WittTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, r);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (r < 1 || r > kMaxWittLength) throw Error(ErrorKind::ResourceLimit, "Witt length must be between 1 and 8");
  auto t = std::make_shared<WittTables>();
  t->p = p;
  t->r = r;
  std::string path = cache_path(p, r);
  if (!path.empty() && load_tables(path, *t) && spot_check(*t)) {
    reduce_tables(*t);
  } else {
    *t = build(p, r);
    if (!path.empty()) store_tables(path, *t);
  }
  cache.emplace(key, t);
  return t;
}

// ---------------------------------------------------------------- vectors

WittVector::WittVector(Context ctx, std::vector<RatFunc> components) : ctx_(std::move(ctx)), c_(std::move(components)) {
  if (c_.empty() || static_cast<int>(c_.size()) > kMaxWittLength)
    throw Error(ErrorKind::LengthMismatch, "Witt length must be between 1 and 8");
  for (const auto& x : c_) require_same_context(ctx_, x.ctx());
}

WittVector WittVector::zero(const Context& ctx, int r) {
  return WittVector(ctx, std::vector<RatFunc>(r, RatFunc::zero(ctx)));
}

WittVector WittVector::one(const Context& ctx, int r) { return teichmuller(RatFunc::one(ctx), r); }

WittVector WittVector::teichmuller(const RatFunc& a, int r) {
  std::vector<RatFunc> c(r, RatFunc::zero(a.ctx()));
  c[0] = a;
  return WittVector(a.ctx(), std::move(c));
}

bool WittVector::is_zero() const {
  for (const auto& x : c_)
    if (!x.is_zero()) return false;
  return true;
}

int WittVector::leading_zeros() const {
  int k = 0;
  while (k < length() && c_[k].is_zero()) ++k;
  return k;
}

int WittVector::compare(const WittVector& o) const {
  if (length() != o.length()) return length() < o.length() ? -1 : 1;
  for (int i = 0; i < length(); ++i) {
    int c = c_[i].compare(o.c_[i]);
    if (c) return c;
  }
  return 0;
}

size_t WittVector::hash() const {
  size_t h = 7;
  for (const auto& x : c_) h = h * 1000003 + x.hash();
  return h;
}

std::string WittVector::to_string() const {
  std::string s = "[";
  for (int i = 0; i < length(); ++i) {
    if (i) s += ", ";
    s += c_[i].to_string();
  }
  return s + "]";
}

// ---------------------------------------------------------------- evaluation

namespace {

void check_pair(const WittVector& a, const WittVector& b) {
  require_same_context(a.ctx(), b.ctx());
  if (a.length() != b.length()) throw Error(ErrorKind::LengthMismatch, "Witt vectors of different lengths");
}

Poly frob_iter(const Poly& f, int k) {
  Poly r = f;
  for (int i = 0; i < k; ++i) r = r.frobenius();
  return r;
}

struct Factor {
  Poly f;
  int64_t e;
};

// Pairwise coprime monic base for a list of monic denominators, with the
// exponents of their least common multiple.
std::vector<Factor> coprime_base(const std::vector<Poly>& dens) {
  std::vector<Poly> base;
  for (const auto& d : dens) {
    if (d.is_one()) continue;
    std::vector<Poly> pending = {d};
    while (!pending.empty()) {
      Poly a = pending.back();
      pending.pop_back();
      if (a.is_one()) continue;
      bool merged = false;
      for (size_t j = 0; j < base.size(); ++j) {
        Poly g = gcd(a, base[j]);
        if (g.is_one()) continue;
        Poly b = base[j];
        base.erase(base.begin() + static_cast<long>(j));
        pending.push_back(divide_or_throw(a, g).monic());
        pending.push_back(divide_or_throw(b, g).monic());
        pending.push_back(g);
        merged = true;
        break;
      }
      if (!merged) base.push_back(a);
    }
  }
  std::vector<Factor> out;
  for (auto& f : base) {
    int64_t e = 0;
    for (const auto& d : dens) {
      int64_t k = 0;
      Poly q = d;
      while (true) {
        auto r = divide_exact(q, f);
        if (!r) break;
        q = *r;
        ++k;
      }
      e = std::max(e, k);
    }
    out.push_back(Factor{f, e});
  }
  return out;
}

Poly expand(const std::vector<Factor>& fs, int64_t scale) {
  Poly D;
  bool first = true;
  for (const auto& x : fs) {
    Poly t = x.f.pow(static_cast<unsigned>(x.e * scale));
    D = first ? t : D * t;
    first = false;
  }
  return D;
}

// num / prod f^(e * mult) in canonical form, cancelling only along the base.
RatFunc reduce_along(const Context& ctx, Poly num, std::vector<Factor> fs, int64_t mult) {
  uint32_t p = ctx->p();
  if (num.is_zero()) return RatFunc::zero(ctx);
  for (auto& x : fs) x.e *= mult;
  while (true) {
    for (auto& x : fs)
      while (x.e > 0) {
        auto q = divide_exact(num, x.f);
        if (!q) break;
        num = std::move(*q);
        --x.e;
      }
    bool split = false;
    for (size_t j = 0; j < fs.size(); ++j) {
      if (fs[j].e == 0) continue;
      Poly g = gcd(num, fs[j].f);
      if (g.is_one()) continue;
      Factor rest{divide_or_throw(fs[j].f, g).monic(), fs[j].e};
      fs[j].f = g;
      fs.push_back(rest);
      split = true;
      break;
    }
    if (!split) break;
  }
  Poly den = Poly::constant(p, 1);
  for (const auto& x : fs)
    if (x.e > 0) den = den * x.f.pow(static_cast<unsigned>(x.e));
  return RatFunc::from_reduced(ctx, std::move(num), std::move(den));
}

struct Homogenized {
  std::vector<Factor> base;
  Poly D;
};

Homogenized common_denominator(std::initializer_list<const WittVector*> vs) {
  std::vector<Poly> dens;
  uint32_t p = 2;
  for (const auto* v : vs)
    for (const auto& x : v->components()) {
      p = x.prime();
      if (!x.den().is_one()) dens.push_back(x.den());
    }
  Homogenized h;
  h.base = coprime_base(dens);
  h.D = h.base.empty() ? Poly::constant(p, 1) : expand(h.base, 1);
  return h;
}

// Multiplying by the Teichmuller lift of D scales slot i by D^(p^i), which
// turns rational components into polynomial ones.
std::vector<Poly> homogenize(const WittVector& a, const Poly& D) {
  std::vector<Poly> out;
  for (int i = 0; i < a.length(); ++i) {
    const RatFunc& x = a[i];
    if (x.is_zero()) {
      out.push_back(Poly(a.ctx()->p()));
      continue;
    }
    Poly Dp = frob_iter(D, i);
    out.push_back(x.den().is_one() ? x.num() * Dp : x.num() * divide_or_throw(Dp, x.den()));
  }
  return out;
}

// Undo the scaling by [D]^k.
WittVector dehomogenize(const Context& ctx, const std::vector<Poly>& comps, const Homogenized& h, int k) {
  std::vector<RatFunc> out;
  uint64_t pi = 1;
  for (size_t i = 0; i < comps.size(); ++i) {
    if (h.base.empty()) out.push_back(RatFunc::from_poly(ctx, comps[i]));
    else out.push_back(reduce_along(ctx, comps[i], h.base, static_cast<int64_t>(pi) * k));
    pi *= ctx->p();
  }
  return WittVector(ctx, std::move(out));
}

std::vector<Poly> eval_tables(const std::vector<Poly>& table, const std::vector<Poly>& X, const std::vector<Poly>& Y,
                              uint32_t p) {
  int r = static_cast<int>(X.size());
  std::vector<std::map<int, Poly>> cache(2 * r);
  auto power = [&](int var, int e) -> const Poly& {
    auto& m = cache[var];
    auto it = m.find(e);
    if (it != m.end()) return it->second;
    const Poly& base = var < r ? X[var] : Y[var - r];
    return m.emplace(e, base.pow(static_cast<unsigned>(e))).first->second;
  };
  std::vector<Poly> out;
  for (const auto& t : table) {
    Poly acc(p);
    for (const auto& term : t.terms()) {
      Poly m = Poly::constant(p, term.coeff);
      for (int v = 0; v < 2 * r && !m.is_zero(); ++v)
        if (term.exp[v]) m = m * power(v, term.exp[v]);
      acc += m;
    }
    out.push_back(acc);
  }
  return out;
}

uint32_t ghost_modulus(uint32_t p, int r) {
  uint64_t M = 1;
  for (int i = 0; i < r; ++i) {
    M *= p;
    if (M >= (uint64_t(1) << 31)) return 0;
  }
  return static_cast<uint32_t>(M);
}

Poly lift(const Poly& f, uint32_t M) { return Poly::from_terms(M, f.terms()); }

// Ghost components mod M = p^r of polynomial Witt components.
std::vector<Poly> ghost_mod(const std::vector<Poly>& a, uint32_t p, uint32_t M) {
  int r = static_cast<int>(a.size());
  std::vector<std::vector<Poly>> pw(r);
  for (int i = 0; i < r; ++i) {
    pw[i].push_back(lift(a[i], M));
    for (int j = 1; j < r - i; ++j) pw[i].push_back(pw[i].back().pow(p));
  }
  std::vector<Poly> w;
  for (int n = 0; n < r; ++n) {
    Poly acc(M);
    uint32_t pi = 1;
    for (int i = 0; i <= n; ++i) {
      acc += pw[i][n - i].scale(pi);
      pi *= p;
    }
    w.push_back(acc);
  }
  return w;
}

// Solves w_n(c) = ghost[n] mod p^(n+1) for c_n mod p. Only the residues of
// the c_i mod p matter because p^i c^(p^(n-i)) mod p^(n+1) depends on c mod p.
std::vector<Poly> from_ghost_mod(const std::vector<Poly>& ghost, uint32_t p, uint32_t M) {
  int r = static_cast<int>(ghost.size());
  std::vector<Poly> c;
  std::vector<std::vector<Poly>> pw;
  for (int n = 0; n < r; ++n) {
    Poly acc = ghost[n];
    uint32_t pi = 1;
    for (int i = 0; i < n; ++i) {
      acc -= pw[i][n - i].scale(pi);
      pi *= p;
    }
    uint32_t mod = pi * p;
    std::vector<Term> out;
    for (const auto& t : acc.terms()) {
      uint32_t v = t.coeff % mod;
      if (v % pi) throw Error(ErrorKind::InternalLimit, "ghost lift is not divisible");
      v = (v / pi) % p;
      if (v) out.push_back(Term{t.exp, v});
    }
    Poly cn = Poly::from_terms(p, std::move(out));
    pw.emplace_back();
    pw.back().push_back(lift(cn, M));
    for (int j = 1; j < r - n; ++j) pw.back().push_back(pw.back().back().pow(p));
    c.push_back(std::move(cn));
  }
  return c;
}

size_t table_terms(const std::vector<Poly>& t) {
  size_t n = 0;
  for (const auto& x : t) n += x.size();
  return n;
}

enum class Op { Add, Mul };

bool use_tables(WittEngine engine, uint32_t p, int r, Op op) {
  if (engine == WittEngine::Tables) return true;
  if (ghost_modulus(p, r) == 0) return true;
  if (engine == WittEngine::GhostLift) return false;
  if (r > 4) return false;
  auto t = WittTables::get(p, r);
  return table_terms(op == Op::Add ? t->sum_mod_p : t->prod_mod_p) <= 48;
}

WittVector add_impl(const WittVector& a, const WittVector& b, WittEngine engine) {
  const Context& ctx = a.ctx();
  uint32_t p = ctx->p();
  int r = a.length();
  Homogenized h = common_denominator({&a, &b});
  auto X = homogenize(a, h.D), Y = homogenize(b, h.D);
  std::vector<Poly> S;
  if (use_tables(engine, p, r, Op::Add)) {
    S = eval_tables(WittTables::get(p, r)->sum_mod_p, X, Y, p);
  } else {
    uint32_t M = ghost_modulus(p, r);
    auto gx = ghost_mod(X, p, M), gy = ghost_mod(Y, p, M);
    for (int n = 0; n < r; ++n) gx[n] += gy[n];
    S = from_ghost_mod(gx, p, M);
  }
  return dehomogenize(ctx, S, h, 1);
}

}  // namespace

WittVector witt_add(const WittVector& a, const WittVector& b, WittEngine engine) {
  check_pair(a, b);
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;
  int r = a.length();
  // V is additive, so shared leading zeros can be stripped.
  int z = std::min(a.leading_zeros(), b.leading_zeros());
  if (z > 0) {
    std::vector<RatFunc> sa(a.components().begin() + z, a.components().end());
    std::vector<RatFunc> sb(b.components().begin() + z, b.components().end());
    WittVector s = add_impl(WittVector(a.ctx(), sa), WittVector(a.ctx(), sb), engine);
    return witt_shift_iota(s, r);
  }
  return add_impl(a, b, engine);
}

WittVector witt_neg(const WittVector& a, WittEngine engine) {
  const Context& ctx = a.ctx();
  uint32_t p = ctx->p();
  int r = a.length();
  if (a.is_zero()) return a;
  if (p != 2) {
    std::vector<RatFunc> c;
    for (const auto& x : a.components()) c.push_back(-x);
    return WittVector(ctx, std::move(c));
  }
  Homogenized h = common_denominator({&a});
  auto X = homogenize(a, h.D);
  std::vector<Poly> N;
  if (engine == WittEngine::Tables || ghost_modulus(p, r) == 0) {
    N = eval_tables(WittTables::get(p, r)->neg_mod_p, X, X, p);
  } else {
    uint32_t M = ghost_modulus(p, r);
    auto g = ghost_mod(X, p, M);
    for (auto& x : g) x = -x;
    N = from_ghost_mod(g, p, M);
  }
  return dehomogenize(ctx, N, h, 1);
}

WittVector witt_sub(const WittVector& a, const WittVector& b, WittEngine engine) {
  check_pair(a, b);
  return witt_add(a, witt_neg(b, engine), engine);
}

WittVector witt_mul(const WittVector& a, const WittVector& b, WittEngine engine) {
  check_pair(a, b);
  const Context& ctx = a.ctx();
  uint32_t p = ctx->p();
  int r = a.length();
  if (a.is_zero() || b.is_zero()) return WittVector::zero(ctx, r);
  Homogenized h = common_denominator({&a, &b});
  auto X = homogenize(a, h.D), Y = homogenize(b, h.D);
  std::vector<Poly> P;
  if (use_tables(engine, p, r, Op::Mul)) {
    P = eval_tables(WittTables::get(p, r)->prod_mod_p, X, Y, p);
  } else {
    uint32_t M = ghost_modulus(p, r);
    auto gx = ghost_mod(X, p, M), gy = ghost_mod(Y, p, M);
    for (int n = 0; n < r; ++n) gx[n] *= gy[n];
    P = from_ghost_mod(gx, p, M);
  }
  return dehomogenize(ctx, P, h, 2);
}

WittVector witt_scalar(int64_t k, const WittVector& a) {
  const Context& ctx = a.ctx();
  uint32_t p = ctx->p();
  int r = a.length();
  if (k < 0) return witt_neg(witt_scalar(-k, a));
  if (k == 0 || a.is_zero()) return WittVector::zero(ctx, r);
  if (k == 1) return a;
  uint32_t M = ghost_modulus(p, r);
  if (M == 0) {
    WittVector acc = WittVector::zero(ctx, r), base = a;
    while (k) {
      if (k & 1) acc = witt_add(acc, base);
      k >>= 1;
      if (k) base = witt_add(base, base);
    }
    return acc;
  }
  uint32_t kk = static_cast<uint32_t>(k % M);
  if (kk == 0) return WittVector::zero(ctx, r);
  Homogenized h = common_denominator({&a});
  auto X = homogenize(a, h.D);
  auto g = ghost_mod(X, p, M);
  for (auto& x : g) x = x.scale(kk);
  return dehomogenize(ctx, from_ghost_mod(g, p, M), h, 1);
}

WittVector witt_frobenius(const WittVector& a) {
  std::vector<RatFunc> c;
  for (const auto& x : a.components()) c.push_back(x.frobenius());
  return WittVector(a.ctx(), std::move(c));
}

WittVector witt_verschiebung(const WittVector& a) {
  std::vector<RatFunc> c;
  c.push_back(RatFunc::zero(a.ctx()));
  for (int i = 0; i + 1 < a.length(); ++i) c.push_back(a[i]);
  return WittVector(a.ctx(), std::move(c));
}

WittVector witt_shift_iota(const WittVector& a, int r) {
  int s = a.length();
  if (s > r || r > kMaxWittLength) throw Error(ErrorKind::IndexOutOfRange, "iota needs s <= r");
  std::vector<RatFunc> c(r - s, RatFunc::zero(a.ctx()));
  for (const auto& x : a.components()) c.push_back(x);
  return WittVector(a.ctx(), std::move(c));
}

WittVector witt_truncate_pi(const WittVector& a, int s) {
  int r = a.length();
  if (s < 1 || s >= r) throw Error(ErrorKind::IndexOutOfRange, "pi_s needs 1 <= s < r");
  std::vector<RatFunc> c(a.components().begin(), a.components().begin() + (r - s));
  return WittVector(a.ctx(), std::move(c));
}

WittVector witt_pmul(const WittVector& a) { return witt_verschiebung(witt_frobenius(a)); }

}  // namespace charp
