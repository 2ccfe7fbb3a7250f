// Multivariate gcd over F_p by dense evaluation and interpolation (Brown).
// Evaluation points are taken in an extension F_q, q = p^k <= 2^16, so that
// small primes still have enough of them.
#include "poly_gcd.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "charp/errors.hpp"
#include "charp/fp.hpp"

namespace charp::detail {

namespace {

class Fq {
 public:
  explicit Fq(uint32_t p) : p_(p), k_(1), q_(p) {
    if (p > (1u << 16)) return;
    while (static_cast<uint64_t>(q_) * p <= (1u << 16)) {
      q_ *= p;
      ++k_;
    }
    if (k_ > 1) build_tables();
  }

  uint32_t p() const { return p_; }
  uint32_t size() const { return q_; }

  uint32_t add(uint32_t a, uint32_t b) const {
    if (k_ == 1) return fp::add(a, b, p_);
    if (a == 0) return b;
    if (b == 0) return a;
    uint32_t la = log_[a], lb = log_[b];
    int32_t z = zech_[(lb + q_ - 1 - la) % (q_ - 1)];
    if (z < 0) return 0;
    return exp_[(la + static_cast<uint32_t>(z)) % (q_ - 1)];
  }
  uint32_t neg(uint32_t a) const { return mul(a, p_ - 1); }
  uint32_t sub(uint32_t a, uint32_t b) const { return k_ == 1 ? fp::sub(a, b, p_) : add(a, neg(b)); }
  uint32_t mul(uint32_t a, uint32_t b) const {
    if (k_ == 1) return fp::mul(a, b, p_);
    if (a == 0 || b == 0) return 0;
    return exp_[(log_[a] + log_[b]) % (q_ - 1)];
  }
  uint32_t inv(uint32_t a) const {
    if (k_ == 1) return fp::inv(a, p_);
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  }
  uint32_t pow(uint32_t a, unsigned e) const {
    uint32_t r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

 private:
  // Integers 0..q-1 are read as base-p digit vectors in the polynomial basis,
  // so F_p sits inside as 0..p-1.
  void build_tables() {
    std::vector<uint32_t> f(k_, 0);  // low coefficients of a monic degree k polynomial
    exp_.assign(q_ - 1, 0);
    for (uint64_t cand = 1; cand < q_; ++cand) {
      uint64_t c = cand;
      for (int i = 0; i < k_; ++i, c /= p_) f[i] = static_cast<uint32_t>(c % p_);
      if (f[0] == 0) continue;
      std::vector<uint32_t> cur(k_, 0);
      cur[0] = 1;
      uint32_t period = 0;
      bool ok = true;
      for (uint32_t i = 0; i < q_ - 1; ++i) {
        uint32_t code = 0;
        for (int j = k_ - 1; j >= 0; --j) code = code * p_ + cur[j];
        if (i > 0 && code == 1) {
          ok = false;
          break;
        }
        exp_[i] = code;
        // cur *= x mod f
        uint32_t top = cur[k_ - 1];
        for (int j = k_ - 1; j > 0; --j) cur[j] = cur[j - 1];
        cur[0] = 0;
        for (int j = 0; j < k_; ++j) cur[j] = fp::sub(cur[j], fp::mul(top, f[j], p_), p_);
        period = i + 1;
      }
      uint32_t code = 0;
      for (int j = k_ - 1; j >= 0; --j) code = code * p_ + cur[j];
      if (ok && period == q_ - 1 && code == 1) break;
      if (cand + 1 == q_) throw Error(ErrorKind::InternalLimit, "no primitive polynomial");
    }
    log_.assign(q_, 0);
    for (uint32_t i = 0; i < q_ - 1; ++i) log_[exp_[i]] = i;
    // zech[n] = log(1 + g^n), -1 when the sum vanishes
    zech_.assign(q_ - 1, -1);
    for (uint32_t n = 0; n < q_ - 1; ++n) {
      uint32_t a = exp_[n], s = 0, mult = 1;
      for (int j = 0; j < k_; ++j) {
        uint32_t d = a % p_;
        a /= p_;
        if (j == 0) d = fp::add(d, 1, p_);
        s += d * mult;
        mult *= p_;
      }
      zech_[n] = s == 0 ? -1 : static_cast<int32_t>(log_[s]);
    }
  }

  uint32_t p_;
  int k_;
  uint32_t q_;
  std::vector<uint32_t> exp_, log_;
  std::vector<int32_t> zech_;
};

const Fq& field_for(uint32_t p) {
  static std::mutex mu;
  static std::map<uint32_t, std::unique_ptr<Fq>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[p];
  if (!slot) slot = std::make_unique<Fq>(p);
  return *slot;
}

using QP = std::map<Exponents, uint32_t, std::greater<Exponents>>;
using UPoly = std::vector<uint32_t>;  // dense, low degree first, no trailing zeros

struct NoPoints {};

void u_trim(UPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int u_deg(const UPoly& a) { return static_cast<int>(a.size()) - 1; }

uint32_t u_eval(const Fq& F, const UPoly& a, uint32_t x) {
  uint32_t r = 0;
  for (size_t i = a.size(); i-- > 0;) r = F.add(F.mul(r, x), a[i]);
  return r;
}

UPoly u_monic(const Fq& F, UPoly a) {
  if (a.empty()) return a;
  uint32_t c = F.inv(a.back());
  for (auto& v : a) v = F.mul(v, c);
  return a;
}

// Remainder and (optionally) quotient of a by b.
UPoly u_divmod(const Fq& F, UPoly a, const UPoly& b, UPoly* quot) {
  int db = u_deg(b);
  uint32_t ib = F.inv(b.back());
  if (quot) quot->assign(std::max(0, u_deg(a) - db + 1), 0);
  for (int i = u_deg(a); i >= db; --i) {
    uint32_t c = F.mul(a[i], ib);
    if (c == 0) continue;
    if (quot) (*quot)[i - db] = c;
    for (int j = 0; j <= db; ++j) a[i - db + j] = F.sub(a[i - db + j], F.mul(c, b[j]));
  }
  u_trim(a);
  if (quot) u_trim(*quot);
  return a;
}

UPoly u_gcd(const Fq& F, UPoly a, UPoly b) {
  while (!b.empty()) {
    UPoly r = u_divmod(F, a, b, nullptr);
    a = std::move(b);
    b = std::move(r);
  }
  return u_monic(F, std::move(a));
}

UPoly u_mul(const Fq& F, const UPoly& a, const UPoly& b) {
  if (a.empty() || b.empty()) return {};
  UPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  u_trim(r);
  return r;
}

void qp_add_term(const Fq& F, QP& r, const Exponents& e, uint32_t c) {
  if (c == 0) return;
  auto [it, inserted] = r.emplace(e, c);
  if (!inserted) {
    it->second = F.add(it->second, c);
    if (it->second == 0) r.erase(it);
  }
}

uint32_t qp_mask(const QP& a) {
  uint32_t m = 0;
  for (const auto& [e, c] : a)
    for (int i = 0; i < kMaxVars; ++i)
      if (e[i]) m |= 1u << i;
  return m;
}

int qp_degree(const QP& a, int var) {
  int d = -1;
  for (const auto& [e, c] : a) d = std::max<int>(d, e[var]);
  return d;
}

QP qp_monic(const Fq& F, QP a) {
  if (a.empty()) return a;
  uint32_t c = F.inv(a.begin()->second);
  for (auto& [e, v] : a) v = F.mul(v, c);
  return a;
}

QP qp_eval(const Fq& F, const QP& a, int var, uint32_t x) {
  int d = qp_degree(a, var);
  std::vector<uint32_t> pw(std::max(d, 0) + 1, 1);
  for (int i = 1; i <= d; ++i) pw[i] = F.mul(pw[i - 1], x);
  QP r;
  for (const auto& [e, c] : a) {
    Exponents f = e;
    f[var] = 0;
    qp_add_term(F, r, f, F.mul(c, pw[e[var]]));
  }
  return r;
}

// Coefficients of a as a polynomial in the variables other than var, each a
// univariate polynomial in var.
std::map<Exponents, UPoly, std::greater<Exponents>> qp_split(const QP& a, int var) {
  std::map<Exponents, UPoly, std::greater<Exponents>> out;
  for (const auto& [e, c] : a) {
    Exponents f = e;
    f[var] = 0;
    UPoly& u = out[f];
    if (u.size() <= e[var]) u.resize(e[var] + 1, 0);
    u[e[var]] = c;
  }
  return out;
}

QP qp_join(const std::map<Exponents, UPoly, std::greater<Exponents>>& parts, int var) {
  QP r;
  for (const auto& [f, u] : parts)
    for (size_t i = 0; i < u.size(); ++i) {
      if (u[i] == 0) continue;
      Exponents e = f;
      e[var] = static_cast<uint16_t>(i);
      r.emplace(e, u[i]);
    }
  return r;
}

QP qp_from_upoly(const UPoly& u, int var) {
  std::map<Exponents, UPoly, std::greater<Exponents>> parts;
  parts[Exponents{}] = u;
  return qp_join(parts, var);
}

QP qp_mul(const Fq& F, const QP& a, const QP& b) {
  QP r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) qp_add_term(F, r, exp_add(ea, eb), F.mul(ca, cb));
  return r;
}

bool qp_divides(const Fq& F, const QP& b, QP a) {
  if (b.empty()) return a.empty();
  const auto& [lb, cb] = *b.begin();
  uint32_t ib = F.inv(cb);
  while (!a.empty()) {
    auto [la, ca] = *a.begin();
    if (!exp_divides(lb, la)) return false;
    Exponents s = exp_sub(la, lb);
    uint32_t c = F.mul(ca, ib);
    for (const auto& [e, v] : b) qp_add_term(F, a, exp_add(e, s), F.neg(F.mul(c, v)));
  }
  return true;
}

QP gcd_rec(const Fq& F, const QP& A, const QP& B);

QP gcd_univariate(const Fq& F, const QP& A, const QP& B, int var) {
  auto ua = qp_split(A, var).begin()->second;
  auto ub = qp_split(B, var).begin()->second;
  return qp_from_upoly(u_gcd(F, ua, ub), var);
}

QP gcd_rec(const Fq& F, const QP& A, const QP& B) {
  QP one{{Exponents{}, 1}};
  if (A.empty()) return qp_monic(F, B);
  if (B.empty()) return qp_monic(F, A);
  uint32_t mask = qp_mask(A) | qp_mask(B);
  if (qp_mask(A) == 0 || qp_mask(B) == 0) return one;
  std::vector<int> vars;
  for (int i = 0; i < kMaxVars; ++i)
    if ((mask >> i) & 1) vars.push_back(i);
  if (vars.size() == 1) return gcd_univariate(F, A, B, vars[0]);

  // Evaluate the variable of smallest degree.
  int xn = vars[0];
  int best = 1 << 30;
  for (int v : vars) {
    int d = std::max(qp_degree(A, v), qp_degree(B, v));
    if (d < best) {
      best = d;
      xn = v;
    }
  }

  auto sa = qp_split(A, xn), sb = qp_split(B, xn);
  UPoly ca, cb;
  for (const auto& [f, u] : sa) ca = u_gcd(F, ca, u);
  for (const auto& [f, u] : sb) cb = u_gcd(F, cb, u);
  UPoly cg = u_gcd(F, ca, cb);
  for (auto& [f, u] : sa) u_divmod(F, u, ca, &u);
  for (auto& [f, u] : sb) u_divmod(F, u, cb, &u);
  // Primitive parts constant in the other variables: gcd is the content.
  if (sa.size() == 1 && sa.begin()->first == Exponents{}) return qp_monic(F, qp_from_upoly(cg, xn));
  if (sb.size() == 1 && sb.begin()->first == Exponents{}) return qp_monic(F, qp_from_upoly(cg, xn));
  QP pa = qp_join(sa, xn), pb = qp_join(sb, xn);
  const UPoly& la = sa.begin()->second;
  const UPoly& lb = sb.begin()->second;
  UPoly gamma = u_gcd(F, la, lb);
  int bound = std::min(qp_degree(pa, xn), qp_degree(pb, xn)) + u_deg(gamma);

  QP H;
  UPoly M{1};
  Exponents lmH{};
  bool have = false;
  int count = 0;
  for (uint32_t alpha = 1; alpha < F.size(); ++alpha) {
    uint32_t ga = u_eval(F, gamma, alpha);
    if (ga == 0 || u_eval(F, la, alpha) == 0 || u_eval(F, lb, alpha) == 0) continue;
    QP g = gcd_rec(F, qp_eval(F, pa, xn, alpha), qp_eval(F, pb, xn, alpha));
    if (g.size() == 1 && g.begin()->first == Exponents{}) return qp_monic(F, qp_from_upoly(cg, xn));
    uint32_t s = F.mul(ga, F.inv(g.begin()->second));
    for (auto& [e, v] : g) v = F.mul(v, s);
    const Exponents& lm = g.begin()->first;
    bool stable = false;
    if (have && lm > lmH) continue;
    if (!have || lm < lmH) {
      H = g;
      M = UPoly{F.neg(alpha), 1};
      lmH = lm;
      have = true;
      count = 1;
    } else {
      QP h_at = qp_eval(F, H, xn, alpha);
      if (h_at == g) {
        stable = true;
      } else {
        // H += (g - H(alpha)) * M / M(alpha)
        uint32_t im = F.inv(u_eval(F, M, alpha));
        QP diff = g;
        for (const auto& [e, v] : h_at) qp_add_term(F, diff, e, F.neg(v));
        for (auto& [e, v] : diff) v = F.mul(v, im);
        QP corr = qp_mul(F, diff, qp_from_upoly(M, xn));
        for (const auto& [e, v] : corr) qp_add_term(F, H, e, v);
      }
      M = u_mul(F, M, UPoly{F.neg(alpha), 1});
      ++count;
    }
    if (!stable && count <= bound) continue;
    auto sh = qp_split(H, xn);
    UPoly ch;
    for (const auto& [f, u] : sh) ch = u_gcd(F, ch, u);
    for (auto& [f, u] : sh) u_divmod(F, u, ch, &u);
    QP cand = qp_join(sh, xn);
    if (qp_divides(F, cand, pa) && qp_divides(F, cand, pb))
      return qp_monic(F, qp_mul(F, cand, qp_from_upoly(cg, xn)));
  }
  throw NoPoints{};
}

}  // namespace

std::optional<Poly> modular_gcd(const Poly& a, const Poly& b) {
  uint32_t p = a.prime();
  const Fq& F = field_for(p);
  QP A, B;
  for (const auto& t : a.terms()) A.emplace(t.exp, t.coeff);
  for (const auto& t : b.terms()) B.emplace(t.exp, t.coeff);
  QP g;
  try {
    g = gcd_rec(F, A, B);
  } catch (const NoPoints&) {
    return std::nullopt;
  }
  std::vector<Term> terms;
  for (const auto& [e, c] : g) {
    if (c >= p) throw Error(ErrorKind::InternalLimit, "gcd left the prime field");
    terms.push_back(Term{e, c});
  }
  return Poly::from_terms(p, std::move(terms));
}

}  // namespace charp::detail
