#include "charp/valuation.hpp"

#include "charp/errors.hpp"
#include "charp/fp.hpp"

namespace charp {

DivisorValuation DivisorValuation::at(const Context& ctx, int var, int64_t c) {
  if (var < 0 || var >= ctx->num_vars()) throw Error(ErrorKind::UndeclaredVariable, "valuation variable out of range");
  DivisorValuation v;
  v.var_ = var;
  v.center_ = RatFunc::constant(ctx, c);
  return v;
}

DivisorValuation DivisorValuation::at(const Context& ctx, std::string_view var, int64_t c) {
  return at(ctx, ctx->index_or_throw(var), c);
}

DivisorValuation DivisorValuation::at_infinity(const Context& ctx, int var) {
  DivisorValuation v = at(ctx, var, 0);
  v.infinite_ = true;
  return v;
}

DivisorValuation DivisorValuation::at_infinity(const Context& ctx, std::string_view var) {
  return at_infinity(ctx, ctx->index_or_throw(var));
}

DivisorValuation DivisorValuation::at_function(int var, const RatFunc& center) {
  if (center.involves(var)) throw Error(ErrorKind::InvalidContext, "center must not involve the valuation variable");
  DivisorValuation v;
  v.var_ = var;
  v.center_ = center;
  return v;
}

RatFunc DivisorValuation::uniformizer() const {
  RatFunc x = RatFunc::variable(ctx(), var_);
  return infinite_ ? x.inverse() : x - center_;
}

RatFunc DivisorValuation::to_local(const RatFunc& f) const {
  require_same_context(f.ctx(), ctx());
  RatFunc x = RatFunc::variable(ctx(), var_);
  if (infinite_) return f.substitute(var_, x.inverse());
  if (center_.is_zero()) return f;
  return f.substitute(var_, x + center_);
}

RatFunc DivisorValuation::from_local(const RatFunc& f) const {
  require_same_context(f.ctx(), ctx());
  RatFunc x = RatFunc::variable(ctx(), var_);
  if (infinite_) return f.substitute(var_, x.inverse());
  if (center_.is_zero()) return f;
  return f.substitute(var_, x - center_);
}

std::string DivisorValuation::to_string() const {
  const std::string& n = ctx()->name(var_);
  if (infinite_) return "inf(" + n + ")";
  if (center_.is_constant()) return n + "=" + std::to_string(center_.constant_value());
  return n + "=(" + center_.to_string() + ")";
}

bool DivisorValuation::operator==(const DivisorValuation& o) const {
  return var_ == o.var_ && infinite_ == o.infinite_ && center_ == o.center_;
}

int local_valuation(const RatFunc& f, int var) {
  if (f.is_zero()) throw Error(ErrorKind::ZeroInput, "valuation of zero");
  return f.num().min_degree(var) - f.den().min_degree(var);
}

int rf_valuation(const RatFunc& f, const DivisorValuation& v) {
  if (f.is_zero()) throw Error(ErrorKind::ZeroInput, "valuation of zero");
  require_same_context(f.ctx(), v.ctx());
  if (v.is_infinite()) return std::max(f.den().degree(v.var()), 0) - std::max(f.num().degree(v.var()), 0);
  return local_valuation(v.to_local(f), v.var());
}

RatFunc rf_reduce(const RatFunc& f, const DivisorValuation& v) {
  if (f.is_zero()) return f;
  int val = rf_valuation(f, v);
  if (val < 0) throw Error(ErrorKind::NegativeValuation, "reduction of a function with a pole");
  if (val > 0) return RatFunc::zero(f.ctx());
  int var = v.var();
  if (v.is_infinite()) {
    auto nc = f.num().coefficients_in(var);
    auto dc = f.den().coefficients_in(var);
    return RatFunc::fraction(f.ctx(), nc.back(), dc.back());
  }
  RatFunc g = v.to_local(f);
  return g.substitute(var, RatFunc::zero(f.ctx()));
}

std::vector<RatFunc> laurent_coefficients(const RatFunc& f, int var, int lo, int hi) {
  const Context& ctx = f.ctx();
  std::vector<RatFunc> out;
  if (hi < lo) return out;
  out.assign(hi - lo + 1, RatFunc::zero(ctx));
  if (f.is_zero()) return out;
  int a = f.num().min_degree(var), e = f.den().min_degree(var);
  int val = a - e;
  if (hi < val) return out;
  auto nc = f.num().coefficients_in(var);
  auto dc = f.den().coefficients_in(var);
  nc.erase(nc.begin(), nc.begin() + a);
  dc.erase(dc.begin(), dc.begin() + e);
  RatFunc d0inv = RatFunc::from_poly(ctx, dc[0]).inverse();
  int count = hi - val + 1;
  std::vector<RatFunc> q;
  q.reserve(count);
  for (int k = 0; k < count; ++k) {
    RatFunc s = k < static_cast<int>(nc.size()) ? RatFunc::from_poly(ctx, nc[k]) : RatFunc::zero(ctx);
    for (int i = 1; i <= k && i < static_cast<int>(dc.size()); ++i) {
      if (dc[i].is_zero() || q[k - i].is_zero()) continue;
      s -= RatFunc::from_poly(ctx, dc[i]) * q[k - i];
    }
    q.push_back(s * d0inv);
  }
  for (int j = std::max(lo, val); j <= hi; ++j) out[j - lo] = q[j - val];
  return out;
}

std::map<Exponents, RatFunc> rf_frobenius_decompose(const RatFunc& f) {
  const Context& ctx = f.ctx();
  uint32_t p = ctx->p();
  std::map<Exponents, RatFunc> out;
  if (f.is_zero()) return out;
  Poly P = f.den().is_one() ? f.num() : f.num() * f.den().pow(p - 1);
  std::map<Exponents, std::vector<Term>> groups;
  for (const auto& t : P.terms()) {
    Exponents e, q;
    for (int i = 0; i < kMaxVars; ++i) {
      e[i] = static_cast<uint16_t>(t.exp[i] % p);
      q[i] = static_cast<uint16_t>(t.exp[i] / p);
    }
    groups[e].push_back(Term{q, t.coeff});
  }
  for (auto& [e, terms] : groups)
    out.emplace(e, RatFunc::fraction(ctx, Poly::from_terms(p, std::move(terms)), f.den()));
  return out;
}

RatFunc rf_frobenius_recompose(const Context& ctx, const std::map<Exponents, RatFunc>& parts) {
  RatFunc acc = RatFunc::zero(ctx);
  for (const auto& [e, g] : parts)
    acc += g.frobenius() * RatFunc::from_poly(ctx, Poly::monomial(ctx->p(), e));
  return acc;
}

std::optional<RatFunc> rf_pth_root(const RatFunc& f) {
  auto n = pth_root(f.num());
  if (!n) return std::nullopt;
  auto d = pth_root(f.den());
  if (!d) return std::nullopt;
  return RatFunc::fraction(f.ctx(), *n, *d);
}

namespace {

void enumerate_box(const std::vector<int>& vars, const std::vector<int>& bound, int total, size_t idx,
                   Exponents& cur, int used, std::vector<Exponents>& out, size_t cap) {
  if (out.size() > cap) return;
  if (idx == vars.size()) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= bound[idx] && used + k <= total; ++k) {
    cur[vars[idx]] = static_cast<uint16_t>(k);
    enumerate_box(vars, bound, total, idx + 1, cur, used + k, out, cap);
  }
  cur[vars[idx]] = 0;
}

struct Pivot {
  Poly vec;
  int column;
  std::vector<std::pair<int, uint32_t>> steps;  // vec = col - sum c_k * basis[k]
};

}  // namespace

std::optional<RatFunc> solve_artin_schreier(const RatFunc& f, size_t max_unknowns) {
  const Context& ctx = f.ctx();
  uint32_t p = ctx->p();
  if (f.is_zero()) return f;
  // If g = N/D is reduced then g^p - g = (N^p - N D^(p-1)) / D^p is reduced too.
  auto Dopt = pth_root(f.den());
  if (!Dopt) return std::nullopt;
  const Poly& D = *Dopt;
  const Poly& A = f.num();

  std::vector<int> vars;
  std::vector<int> bound;
  uint32_t mask = A.var_mask() | D.var_mask();
  for (int i = 0; i < ctx->num_vars(); ++i) {
    if (!((mask >> i) & 1)) continue;
    vars.push_back(i);
    bound.push_back(std::max(std::max(A.degree(i), 0) / static_cast<int>(p), std::max(D.degree(i), 0)));
  }
  int total = std::max(std::max(A.total_degree(), 0) / static_cast<int>(p), std::max(D.total_degree(), 0));
  std::vector<Exponents> monos;
  Exponents cur{};
  enumerate_box(vars, bound, total, 0, cur, 0, monos, max_unknowns);
  if (monos.size() > max_unknowns) throw Error(ErrorKind::ResourceLimit, "Artin-Schreier search space too large");

  Poly Dp1 = D.pow(p - 1);
  std::vector<Pivot> basis;
  std::map<Exponents, int> pivot_of;
  auto reduce = [&](Poly v, std::vector<std::pair<int, uint32_t>>& steps) {
    while (!v.is_zero()) {
      auto it = pivot_of.find(v.leading().exp);
      if (it == pivot_of.end()) break;
      const Pivot& b = basis[it->second];
      uint32_t c = fp::mul(v.leading_coeff(), fp::inv(b.vec.leading_coeff(), p), p);
      v = v - b.vec.scale(c);
      steps.emplace_back(it->second, c);
    }
    return v;
  };
  for (size_t j = 0; j < monos.size(); ++j) {
    Exponents pe = monos[j];
    for (auto& x : pe) x = static_cast<uint16_t>(x * p);
    Poly col = Poly::monomial(p, pe) - Dp1.mul_monomial(monos[j], 1);
    std::vector<std::pair<int, uint32_t>> steps;
    Poly r = reduce(col, steps);
    if (r.is_zero()) continue;
    pivot_of.emplace(r.leading().exp, static_cast<int>(basis.size()));
    basis.push_back(Pivot{std::move(r), static_cast<int>(j), std::move(steps)});
  }
  std::vector<std::pair<int, uint32_t>> steps;
  Poly rest = reduce(A, steps);
  if (!rest.is_zero()) return std::nullopt;

  // A = sum_s c_s basis[k_s]; unwind each basis vector into columns.
  std::vector<uint32_t> w(basis.size(), 0);
  for (auto [k, c] : steps) w[k] = fp::add(w[k], c, p);
  std::vector<uint32_t> coeff(monos.size(), 0);
  for (int i = static_cast<int>(basis.size()) - 1; i >= 0; --i) {
    if (!w[i]) continue;
    coeff[basis[i].column] = fp::add(coeff[basis[i].column], w[i], p);
    for (auto [k, c] : basis[i].steps) w[k] = fp::sub(w[k], fp::mul(w[i], c, p), p);
  }
  std::vector<Term> terms;
  for (size_t j = 0; j < monos.size(); ++j)
    if (coeff[j]) terms.push_back(Term{monos[j], coeff[j]});
  RatFunc g = RatFunc::fraction(ctx, Poly::from_terms(p, std::move(terms)), D);
  if (g.pow(p) - g != f) throw Error(ErrorKind::InternalLimit, "Artin-Schreier back-substitution failed");
  return g;
}

}  // namespace charp
