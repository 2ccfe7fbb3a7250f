#include "charp/zpoly.hpp"

#include <sstream>
#include <unordered_map>

#include "charp/errors.hpp"

namespace charp {

namespace {

struct ExpHash {
  size_t operator()(const Exponents& e) const {
    size_t h = 1469598103934665603ull;
    for (auto x : e) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

}  // namespace

ZPoly ZPoly::constant(const mpz_class& c) {
  ZPoly r;
  if (c != 0) r.terms_.emplace(Exponents{}, c);
  return r;
}

ZPoly ZPoly::variable(int var, unsigned power) {
  ZPoly r;
  Exponents e{};
  e[var] = static_cast<uint16_t>(power);
  r.terms_.emplace(e, 1);
  return r;
}

void ZPoly::add_term(const Exponents& e, const mpz_class& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

ZPoly ZPoly::operator+(const ZPoly& o) const {
  ZPoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

ZPoly ZPoly::operator-() const {
  ZPoly r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

ZPoly ZPoly::operator-(const ZPoly& o) const { return *this + (-o); }

ZPoly ZPoly::operator*(const ZPoly& o) const {
  std::unordered_map<Exponents, mpz_class, ExpHash> acc;
  acc.reserve(terms_.size() * o.terms_.size() / 2 + 1);
  mpz_class prod;
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      prod = ca * cb;
      acc[exp_add(ea, eb)] += prod;
    }
  ZPoly r;
  for (auto& [e, c] : acc)
    if (c != 0) r.terms_.emplace(e, std::move(c));
  return r;
}

ZPoly ZPoly::scale(const mpz_class& c) const {
  if (c == 0) return ZPoly();
  ZPoly r = *this;
  for (auto& [e, v] : r.terms_) v *= c;
  return r;
}

ZPoly ZPoly::pow(unsigned k) const {
  ZPoly result = constant(1), base = *this;
  while (k) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

ZPoly ZPoly::divexact(const mpz_class& c) const {
  ZPoly r = *this;
  for (auto& [e, v] : r.terms_) {
    if (!mpz_divisible_p(v.get_mpz_t(), c.get_mpz_t()))
      throw Error(ErrorKind::InternalLimit, "universal polynomial is not integral");
    mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), c.get_mpz_t());
  }
  return r;
}

mpz_class ZPoly::evaluate(const std::vector<mpz_class>& point) const {
  mpz_class acc = 0, term, pw;
  for (const auto& [e, c] : terms_) {
    term = c;
    for (size_t i = 0; i < point.size() && i < e.size(); ++i) {
      if (!e[i]) continue;
      mpz_pow_ui(pw.get_mpz_t(), point[i].get_mpz_t(), e[i]);
      term *= pw;
    }
    acc += term;
  }
  return acc;
}

Poly ZPoly::reduce_mod(uint32_t p) const {
  std::vector<Term> out;
  mpz_class m;
  for (const auto& [e, c] : terms_) {
    m = c % p;
    if (m < 0) m += p;
    uint32_t v = static_cast<uint32_t>(m.get_ui());
    if (v) out.push_back(Term{e, v});
  }
  return Poly::from_terms(p, std::move(out));
}

std::string ZPoly::serialize() const {
  std::ostringstream os;
  os << terms_.size() << '\n';
  for (const auto& [e, c] : terms_) {
    for (auto x : e) os << x << ' ';
    os << c.get_str(16) << '\n';
  }
  return os.str();
}

ZPoly ZPoly::deserialize(const std::string& text) {
  std::istringstream is(text);
  size_t n = 0;
  if (!(is >> n)) throw Error(ErrorKind::InternalLimit, "corrupt table cache");
  ZPoly r;
  for (size_t k = 0; k < n; ++k) {
    Exponents e{};
    for (auto& x : e) {
      unsigned v;
      if (!(is >> v)) throw Error(ErrorKind::InternalLimit, "corrupt table cache");
      x = static_cast<uint16_t>(v);
    }
    std::string hex;
    if (!(is >> hex)) throw Error(ErrorKind::InternalLimit, "corrupt table cache");
    r.terms_.emplace(e, mpz_class(hex, 16));
  }
  return r;
}

}  // namespace charp
