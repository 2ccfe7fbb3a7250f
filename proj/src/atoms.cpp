#include "atoms.hpp"

#include "charp/errors.hpp"

namespace charp::detail {

namespace {

Poly strip_powers(Poly f) {
  while (auto r = pth_root(f)) {
    if (r->total_degree() == f.total_degree()) break;
    f = *r;
  }
  return f.monic();
}

void add_primitive(std::vector<Poly>& work, const Poly& f) {
  if (f.is_zero() || f.is_constant()) return;
  Exponents mc = f.monomial_content();
  Poly rest = divide_or_throw(f, Poly::monomial(f.prime(), mc));
  for (int i = 0; i < kMaxVars; ++i)
    if (mc[i]) work.push_back(Poly::variable(f.prime(), i));
  if (!rest.is_constant()) work.push_back(rest);
}

}  // namespace

AtomSplit split_over_coprime_base(const Context& ctx, const std::vector<RatFunc>& entries) {
  std::vector<Poly> work, base;
  for (const auto& b : entries) {
    if (b.is_zero()) throw Error(ErrorKind::ZeroArgument, "symbol entry is zero");
    add_primitive(work, b.num());
    add_primitive(work, b.den());
  }
  while (!work.empty()) {
    Poly f = strip_powers(work.back());
    work.pop_back();
    if (f.is_constant()) continue;
    bool split = false;
    for (size_t i = 0; i < base.size(); ++i) {
      Poly g = gcd(f, base[i]);
      if (g.is_constant()) continue;
      Poly b = base[i];
      base.erase(base.begin() + static_cast<long>(i));
      work.push_back(g);
      Poly bq = divide_or_throw(b, g), fq = divide_or_throw(f, g);
      if (!bq.is_constant()) work.push_back(bq);
      if (!fq.is_constant()) work.push_back(fq);
      split = true;
      break;
    }
    if (!split) base.push_back(f);
  }
  std::sort(base.begin(), base.end(), [](const Poly& a, const Poly& b) { return a.compare(b) < 0; });

  AtomSplit out;
  for (const auto& a : base) out.atoms.push_back(RatFunc::from_poly(ctx, a));
  for (const auto& b : entries) {
    AtomPowers ap;
    Poly num = b.num(), den = b.den();
    for (size_t i = 0; i < base.size(); ++i) {
      int64_t e = 0;
      while (auto q = divide_exact(num, base[i])) {
        num = std::move(*q);
        ++e;
      }
      while (auto q = divide_exact(den, base[i])) {
        den = std::move(*q);
        --e;
      }
      if (e) ap.powers.emplace_back(static_cast<int>(i), e);
    }
    if (!num.is_constant() || !den.is_constant())
      throw Error(ErrorKind::InternalLimit, "entry not covered by its coprime base");
    ap.constant = RatFunc::fraction(ctx, num, den).constant_value();
    out.entries.push_back(std::move(ap));
  }
  return out;
}

}  // namespace charp::detail
