#include "charp/poly.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>

#include "charp/errors.hpp"
#include "charp/fp.hpp"
#include "poly_gcd.hpp"

namespace charp {

Exponents exp_add(const Exponents& a, const Exponents& b) {
  Exponents r;
  for (int i = 0; i < kMaxVars; ++i) {
    uint32_t s = uint32_t(a[i]) + b[i];
    if (s > 0xFFFF) throw Error(ErrorKind::ResourceLimit, "exponent overflow");
    r[i] = static_cast<uint16_t>(s);
  }
  return r;
}

bool exp_divides(const Exponents& a, const Exponents& b) {
  for (int i = 0; i < kMaxVars; ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Exponents exp_sub(const Exponents& a, const Exponents& b) {
  Exponents r;
  for (int i = 0; i < kMaxVars; ++i) r[i] = static_cast<uint16_t>(a[i] - b[i]);
  return r;
}

namespace {

bool term_greater(const Term& a, const Term& b) { return a.exp > b.exp; }

// Sorts and merges duplicate exponents, dropping zeros.
void canonicalize(std::vector<Term>& t, uint32_t p) {
  std::sort(t.begin(), t.end(), term_greater);
  size_t out = 0;
  for (size_t i = 0; i < t.size();) {
    Term acc = t[i];
    size_t j = i + 1;
    while (j < t.size() && t[j].exp == acc.exp) {
      acc.coeff = fp::add(acc.coeff, t[j].coeff, p);
      ++j;
    }
    if (acc.coeff != 0) t[out++] = acc;
    i = j;
  }
  t.resize(out);
}

}  // namespace

class PolyBuilder {
 public:
  static Poly make(uint32_t p, std::vector<Term> sorted) {
    Poly r(p);
    r.terms_ = std::move(sorted);
    return r;
  }
};

Poly Poly::constant(uint32_t p, int64_t c) {
  Poly r(p);
  uint32_t v = fp::reduce(c, p);
  if (v) r.terms_.push_back(Term{Exponents{}, v});
  return r;
}

Poly Poly::monomial(uint32_t p, const Exponents& e, uint32_t c) {
  Poly r(p);
  if (c % p) r.terms_.push_back(Term{e, c % p});
  return r;
}

Poly Poly::variable(uint32_t p, int var, unsigned power) {
  Exponents e{};
  e[var] = static_cast<uint16_t>(power);
  return monomial(p, e, 1);
}

Poly Poly::from_terms(uint32_t p, std::vector<Term> terms) {
  for (auto& t : terms) t.coeff %= p;
  canonicalize(terms, p);
  return PolyBuilder::make(p, std::move(terms));
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exp == Exponents{});
}

bool Poly::is_one() const {
  return terms_.size() == 1 && terms_[0].coeff == 1 && terms_[0].exp == Exponents{};
}

uint32_t Poly::constant_value() const {
  if (terms_.empty()) return 0;
  if (!is_constant()) throw Error(ErrorKind::InternalLimit, "constant_value of non-constant polynomial");
  return terms_[0].coeff;
}

int Poly::degree(int var) const {
  int d = -1;
  for (const auto& t : terms_) d = std::max(d, int(t.exp[var]));
  return d;
}

int Poly::min_degree(int var) const {
  if (terms_.empty()) return -1;
  int d = 0xFFFF;
  for (const auto& t : terms_) d = std::min(d, int(t.exp[var]));
  return d;
}

int Poly::total_degree() const {
  int d = -1;
  for (const auto& t : terms_) {
    int s = 0;
    for (auto e : t.exp) s += e;
    d = std::max(d, s);
  }
  return d;
}

uint32_t Poly::var_mask() const {
  uint32_t m = 0;
  for (const auto& t : terms_)
    for (int i = 0; i < kMaxVars; ++i)
      if (t.exp[i]) m |= 1u << i;
  return m;
}

bool Poly::involves(int var) const {
  for (const auto& t : terms_)
    if (t.exp[var]) return true;
  return false;
}

Poly Poly::operator-() const {
  Poly r(p_);
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff = fp::neg(t.coeff, p_);
  return r;
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  size_t i = 0, j = 0;
  while (i < terms_.size() && j < o.terms_.size()) {
    if (terms_[i].exp > o.terms_[j].exp) {
      out.push_back(terms_[i++]);
    } else if (o.terms_[j].exp > terms_[i].exp) {
      out.push_back(o.terms_[j++]);
    } else {
      uint32_t c = fp::add(terms_[i].coeff, o.terms_[j].coeff, p_);
      if (c) out.push_back(Term{terms_[i].exp, c});
      ++i;
      ++j;
    }
  }
  while (i < terms_.size()) out.push_back(terms_[i++]);
  while (j < o.terms_.size()) out.push_back(o.terms_[j++]);
  return PolyBuilder::make(p_, std::move(out));
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  if (terms_.empty() || o.terms_.empty()) return Poly(p_);
  if (terms_.size() == 1) return o.mul_monomial(terms_[0].exp, terms_[0].coeff);
  if (o.terms_.size() == 1) return mul_monomial(o.terms_[0].exp, o.terms_[0].coeff);
  const Poly& a = terms_.size() <= o.terms_.size() ? *this : o;
  const Poly& b = terms_.size() <= o.terms_.size() ? o : *this;
  // Accumulate row by row, merging each shifted copy of b.
  std::vector<Term> acc;
  std::vector<Term> row, merged;
  for (const auto& ta : a.terms_) {
    row.clear();
    row.reserve(b.terms_.size());
    for (const auto& tb : b.terms_)
      row.push_back(Term{exp_add(ta.exp, tb.exp), fp::mul(ta.coeff, tb.coeff, p_)});
    merged.clear();
    merged.reserve(acc.size() + row.size());
    size_t i = 0, j = 0;
    while (i < acc.size() && j < row.size()) {
      if (acc[i].exp > row[j].exp) {
        merged.push_back(acc[i++]);
      } else if (row[j].exp > acc[i].exp) {
        merged.push_back(row[j++]);
      } else {
        uint32_t c = fp::add(acc[i].coeff, row[j].coeff, p_);
        if (c) merged.push_back(Term{acc[i].exp, c});
        ++i;
        ++j;
      }
    }
    while (i < acc.size()) merged.push_back(acc[i++]);
    while (j < row.size()) merged.push_back(row[j++]);
    acc.swap(merged);
  }
  return PolyBuilder::make(p_, std::move(acc));
}

Poly Poly::scale(uint32_t c) const {
  c %= p_;
  if (c == 0) return Poly(p_);
  Poly r(p_);
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff = fp::mul(t.coeff, c, p_);
  return r;
}

Poly Poly::mul_monomial(const Exponents& e, uint32_t c) const {
  c %= p_;
  if (c == 0) return Poly(p_);
  Poly r(p_);
  r.terms_.reserve(terms_.size());
  for (const auto& t : terms_) r.terms_.push_back(Term{exp_add(t.exp, e), fp::mul(t.coeff, c, p_)});
  return r;
}

Poly Poly::frobenius() const {
  Poly r(p_);
  r.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    Term u = t;
    for (auto& e : u.exp) {
      uint32_t v = uint32_t(e) * p_;
      if (v > 0xFFFF) throw Error(ErrorKind::ResourceLimit, "exponent overflow");
      e = static_cast<uint16_t>(v);
    }
    r.terms_.push_back(u);
  }
  return r;
}

Poly Poly::pow(unsigned k) const {
  Poly result = Poly::constant(p_, 1);
  if (k == 0) return result;
  if (terms_.size() == 1) {
    Exponents e{};
    for (int i = 0; i < kMaxVars; ++i) {
      uint32_t v = uint32_t(terms_[0].exp[i]) * k;
      if (v > 0xFFFF) throw Error(ErrorKind::ResourceLimit, "exponent overflow");
      e[i] = static_cast<uint16_t>(v);
    }
    return monomial(p_, e, fp::pow(terms_[0].coeff, k, p_));
  }
  // Peel factors of p through Frobenius, which is cheap.
  Poly base = *this;
  while (k % p_ == 0) {
    base = base.frobenius();
    k /= p_;
  }
  while (k) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

Poly Poly::derivative(int var) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    uint32_t e = t.exp[var];
    if (e == 0) continue;
    uint32_t c = fp::mul(t.coeff, e % p_, p_);
    if (!c) continue;
    Term u{t.exp, c};
    u.exp[var] = static_cast<uint16_t>(e - 1);
    out.push_back(u);
  }
  // Lowering one exponent keeps the lex order among survivors.
  return PolyBuilder::make(p_, std::move(out));
}

Poly Poly::evaluate(int var, uint32_t c) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    uint32_t v = t.coeff;
    if (t.exp[var]) v = fp::mul(v, fp::pow(c, t.exp[var], p_), p_);
    if (!v) continue;
    Term u{t.exp, v};
    u.exp[var] = 0;
    out.push_back(u);
  }
  return from_terms(p_, std::move(out));
}

Poly Poly::monic() const {
  if (terms_.empty() || terms_[0].coeff == 1) return *this;
  return scale(fp::inv(terms_[0].coeff, p_));
}

Exponents Poly::monomial_content() const {
  Exponents m{};
  if (terms_.empty()) return m;
  m = terms_[0].exp;
  for (const auto& t : terms_)
    for (int i = 0; i < kMaxVars; ++i) m[i] = std::min(m[i], t.exp[i]);
  return m;
}

std::vector<Poly> Poly::coefficients_in(int var) const {
  int d = degree(var);
  std::vector<std::vector<Term>> parts(d < 0 ? 0 : d + 1);
  for (const auto& t : terms_) {
    Term u = t;
    int k = u.exp[var];
    u.exp[var] = 0;
    parts[k].push_back(u);
  }
  std::vector<Poly> out;
  out.reserve(parts.size());
  // Zeroing one coordinate preserves relative lex order within a part.
  for (auto& part : parts) out.push_back(PolyBuilder::make(p_, std::move(part)));
  return out;
}

Poly Poly::from_coefficients(uint32_t p, const std::vector<Poly>& coeffs, int var) {
  std::vector<Term> out;
  for (size_t k = 0; k < coeffs.size(); ++k)
    for (const auto& t : coeffs[k].terms()) {
      Term u = t;
      u.exp[var] = static_cast<uint16_t>(u.exp[var] + k);
      out.push_back(u);
    }
  return from_terms(p, std::move(out));
}

bool Poly::operator==(const Poly& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].exp != o.terms_[i].exp || terms_[i].coeff != o.terms_[i].coeff) return false;
  return true;
}

int Poly::compare(const Poly& o) const {
  size_t n = std::min(terms_.size(), o.terms_.size());
  for (size_t i = 0; i < n; ++i) {
    if (terms_[i].exp != o.terms_[i].exp) return terms_[i].exp > o.terms_[i].exp ? 1 : -1;
    if (terms_[i].coeff != o.terms_[i].coeff) return terms_[i].coeff > o.terms_[i].coeff ? 1 : -1;
  }
  if (terms_.size() != o.terms_.size()) return terms_.size() > o.terms_.size() ? 1 : -1;
  return 0;
}

size_t Poly::hash() const {
  size_t h = 1469598103934665603ull;
  for (const auto& t : terms_) {
    for (auto e : t.exp) h = (h ^ e) * 1099511628211ull;
    h = (h ^ t.coeff) * 1099511628211ull;
  }
  return h;
}

std::string Poly::to_string(const FieldContext& ctx) const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) s += " + ";
    first = false;
    bool is_const = t.exp == Exponents{};
    std::string mono;
    for (int i = 0; i < kMaxVars; ++i) {
      if (!t.exp[i]) continue;
      if (!mono.empty()) mono += "*";
      mono += ctx.name(i);
      if (t.exp[i] > 1) mono += "^" + std::to_string(t.exp[i]);
    }
    if (is_const) {
      s += std::to_string(t.coeff);
    } else if (t.coeff == 1) {
      s += mono;
    } else {
      s += std::to_string(t.coeff) + "*" + mono;
    }
  }
  return s;
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  uint32_t p = a.prime();
  if (b.is_zero()) throw Error(ErrorKind::DivisionByZero, "polynomial division by zero");
  if (a.is_zero()) return Poly(p);
  if (b.is_constant()) return a.scale(fp::inv(b.constant_value(), p));
  if (b.is_monomial()) {
    const Term& m = b.leading();
    uint32_t ci = fp::inv(m.coeff, p);
    std::vector<Term> out;
    out.reserve(a.size());
    for (const auto& t : a.terms()) {
      if (!exp_divides(m.exp, t.exp)) return std::nullopt;
      out.push_back(Term{exp_sub(t.exp, m.exp), fp::mul(t.coeff, ci, p)});
    }
    return Poly::from_terms(p, std::move(out));
  }
  // Cheap degree screen.
  uint32_t mask = b.var_mask();
  for (int v = 0; v < kMaxVars; ++v)
    if ((mask >> v) & 1)
      if (a.degree(v) < b.degree(v)) return std::nullopt;
  const Term& lb = b.leading();
  uint32_t lbi = fp::inv(lb.coeff, p);
  if (a.size() <= 8) {
    std::vector<Term> q;
    Poly r = a;
    while (!r.is_zero()) {
      const Term& lr = r.leading();
      if (!exp_divides(lb.exp, lr.exp)) return std::nullopt;
      Exponents e = exp_sub(lr.exp, lb.exp);
      uint32_t c = fp::mul(lr.coeff, lbi, p);
      q.push_back(Term{e, c});
      r = r - b.mul_monomial(e, c);
    }
    return Poly::from_terms(p, std::move(q));
  }
  // Remainder kept in an ordered map so each step touches only |b| entries.
  std::map<Exponents, uint32_t, std::greater<>> rem;
  for (const auto& t : a.terms()) rem.emplace_hint(rem.end(), t.exp, t.coeff);
  std::vector<Term> q;
  while (!rem.empty()) {
    auto it = rem.begin();
    if (!exp_divides(lb.exp, it->first)) return std::nullopt;
    Exponents e = exp_sub(it->first, lb.exp);
    uint32_t c = fp::mul(it->second, lbi, p);
    q.push_back(Term{e, c});
    rem.erase(it);
    for (size_t k = 1; k < b.size(); ++k) {
      const Term& t = b.terms()[k];
      Exponents x = exp_add(t.exp, e);
      uint32_t v = fp::mul(t.coeff, c, p);
      auto [jt, fresh] = rem.emplace(x, fp::neg(v, p));
      if (!fresh) {
        jt->second = fp::sub(jt->second, v, p);
        if (jt->second == 0) rem.erase(jt);
      }
    }
  }
  // Quotient terms come out in decreasing order.
  return PolyBuilder::make(p, std::move(q));
}

Poly divide_or_throw(const Poly& a, const Poly& b) {
  auto q = divide_exact(a, b);
  if (!q) throw Error(ErrorKind::InternalLimit, "inexact polynomial division");
  return *q;
}

namespace {

Poly one(uint32_t p) { return Poly::constant(p, 1); }

Poly leading_coeff_in(const Poly& a, int var) {
  int d = a.degree(var);
  std::vector<Term> out;
  for (const auto& t : a.terms())
    if (t.exp[var] == d) {
      Term u = t;
      u.exp[var] = 0;
      out.push_back(u);
    }
  return Poly::from_terms(a.prime(), std::move(out));
}

// Pseudo-remainder of a by b in var (without the final power of lc(b)).
Poly pseudo_remainder(const Poly& a, const Poly& b, int var) {
  uint32_t p = a.prime();
  int db = b.degree(var);
  Poly lcb = leading_coeff_in(b, var);
  Poly r = a;
  while (!r.is_zero() && r.degree(var) >= db) {
    int dr = r.degree(var);
    Poly lcr = leading_coeff_in(r, var);
    Exponents shift{};
    shift[var] = static_cast<uint16_t>(dr - db);
    r = r * lcb - (b * lcr).mul_monomial(shift, 1);
  }
  (void)p;
  return r;
}

Poly primitive_part(const Poly& a, int var) { return divide_or_throw(a, content_in(a, var)); }

// Cleared while computing the reference gcd.
thread_local bool use_modular = true;

Poly gcd_impl(Poly a, Poly b);

Poly prs_gcd(Poly a, Poly b, int var) {
  uint32_t p = a.prime();
  if (a.degree(var) < b.degree(var)) std::swap(a, b);
  while (true) {
    Poly r = pseudo_remainder(a, b, var);
    if (r.is_zero()) return primitive_part(b, var).monic();
    if (r.degree(var) <= 0) return one(p);
    a = std::move(b);
    b = primitive_part(r, var);
  }
}

Poly monomial_gcd_with(const Poly& mono, const Poly& other) {
  Exponents e = mono.leading().exp;
  Exponents c = other.monomial_content();
  for (int i = 0; i < kMaxVars; ++i) e[i] = std::min(e[i], c[i]);
  return Poly::monomial(mono.prime(), e, 1);
}

Poly gcd_impl(Poly a, Poly b) {
  uint32_t p = a.prime();
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return one(p);
  if (a.is_monomial()) return monomial_gcd_with(a, b);
  if (b.is_monomial()) return monomial_gcd_with(b, a);
  if (a.monic() == b.monic()) return a.monic();

  // Split off monomial contents.
  Exponents ma = a.monomial_content(), mb = b.monomial_content();
  Exponents mg{};
  bool any_a = false, any_b = false;
  for (int i = 0; i < kMaxVars; ++i) {
    mg[i] = std::min(ma[i], mb[i]);
    any_a |= ma[i] != 0;
    any_b |= mb[i] != 0;
  }
  if (any_a) a = divide_or_throw(a, Poly::monomial(p, ma));
  if (any_b) b = divide_or_throw(b, Poly::monomial(p, mb));
  Poly mono = Poly::monomial(p, mg);

  // Variables present in only one argument cannot occur in the gcd.
  while (true) {
    if (a.is_constant() || b.is_constant()) return mono;
    uint32_t A = a.var_mask(), B = b.var_mask();
    if ((A & B) == 0) return mono;
    if (A == B) break;
    for (int v = 0; v < kMaxVars; ++v) {
      uint32_t bit = 1u << v;
      if ((A & bit) && !(B & bit)) {
        a = content_in(a, v);
        break;
      }
      if ((B & bit) && !(A & bit)) {
        b = content_in(b, v);
        break;
      }
    }
  }
  uint32_t common = a.var_mask();
  if (use_modular && std::popcount(common) >= 2) {
    if (auto g = detail::modular_gcd(a, b)) return (mono * *g).monic();
  }
  int var = -1, best = 1 << 30;
  for (int v = 0; v < kMaxVars; ++v) {
    if (!((common >> v) & 1)) continue;
    int d = std::max(a.degree(v), b.degree(v));
    if (d < best) {
      best = d;
      var = v;
    }
  }
  Poly ca = content_in(a, var), cb = content_in(b, var);
  Poly pa = divide_or_throw(a, ca), pb = divide_or_throw(b, cb);
  Poly c = gcd_impl(ca, cb);
  Poly g = prs_gcd(pa, pb, var);
  return (mono * c * g).monic();
}

}  // namespace

Poly content_in(const Poly& a, int var) {
  if (a.is_zero()) return a;
  auto coeffs = a.coefficients_in(var);
  Poly g(a.prime());
  for (const auto& c : coeffs) {
    if (c.is_zero()) continue;
    g = gcd_impl(g, c);
    if (g.is_one()) break;
  }
  return g.monic();
}

Poly gcd(const Poly& a, const Poly& b) { return gcd_impl(a, b); }

Poly detail::prs_gcd_reference(const Poly& a, const Poly& b) {
  use_modular = false;
  try {
    Poly g = gcd_impl(a, b);
    use_modular = true;
    return g;
  } catch (...) {
    use_modular = true;
    throw;
  }
}

std::optional<Poly> pth_root(const Poly& a) {
  uint32_t p = a.prime();
  std::vector<Term> out;
  out.reserve(a.size());
  for (const auto& t : a.terms()) {
    Term u = t;
    for (auto& e : u.exp) {
      if (e % p) return std::nullopt;
      e = static_cast<uint16_t>(e / p);
    }
    out.push_back(u);
  }
  return Poly::from_terms(p, std::move(out));
}

}  // namespace charp
