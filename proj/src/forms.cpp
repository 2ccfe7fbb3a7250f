#include "charp/forms.hpp"

#include <bit>

#include "charp/errors.hpp"
#include "charp/fp.hpp"
#include "charp/valuation.hpp"

namespace charp {

namespace {

// Sign of dx_I ^ dx_J written as dx_(I|J); 0 when I and J meet.
int wedge_sign(uint32_t I, uint32_t J) {
  if (I & J) return 0;
  int inversions = 0;
  for (uint32_t j = J; j; j &= j - 1) {
    int b = std::countr_zero(j);
    inversions += std::popcount(I >> (b + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

RatFunc monomial_of_mask(const Context& ctx, uint32_t mask, uint32_t power) {
  Exponents e{};
  for (int i = 0; i < kMaxVars; ++i)
    if ((mask >> i) & 1) e[i] = static_cast<uint16_t>(power);
  return RatFunc::from_poly(ctx, Poly::monomial(ctx->p(), e));
}

void require_forms(const DiffForm& a, const DiffForm& b) {
  require_same_context(a.ctx(), b.ctx());
  if (a.degree() != b.degree()) throw Error(ErrorKind::LengthMismatch, "forms of different degrees");
}

}  // namespace

DiffForm DiffForm::function(const RatFunc& f) {
  DiffForm w(f.ctx(), 0);
  w.add_term(0, f);
  return w;
}

DiffForm DiffForm::basis(const RatFunc& coeff, uint32_t mask) {
  DiffForm w(coeff.ctx(), std::popcount(mask));
  w.add_term(mask, coeff);
  return w;
}

DiffForm DiffForm::dx(const Context& ctx, int var) { return basis(RatFunc::one(ctx), 1u << var); }

void DiffForm::add_term(uint32_t mask, const RatFunc& f) {
  if (f.is_zero()) return;
  auto it = c_.find(mask);
  if (it == c_.end()) {
    c_.emplace(mask, f);
    return;
  }
  it->second += f;
  if (it->second.is_zero()) c_.erase(it);
}

RatFunc DiffForm::coeff(uint32_t mask) const {
  auto it = c_.find(mask);
  return it == c_.end() ? RatFunc::zero(ctx_) : it->second;
}

uint32_t DiffForm::var_mask() const {
  uint32_t m = 0;
  for (const auto& [I, f] : c_) m |= I | f.var_mask();
  return m;
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
  if (o.is_zero() && ctx_) return *this;
  if (is_zero() && !ctx_) return o;
  require_forms(*this, o);
  DiffForm r = *this;
  for (const auto& [I, f] : o.c_) r.add_term(I, f);
  return r;
}

DiffForm DiffForm::operator-() const {
  DiffForm r = *this;
  for (auto& [I, f] : r.c_) f = -f;
  return r;
}

DiffForm DiffForm::operator-(const DiffForm& o) const { return *this + (-o); }

DiffForm DiffForm::operator*(const RatFunc& f) const {
  require_same_context(ctx_, f.ctx());
  DiffForm r(ctx_, degree_);
  if (f.is_zero()) return r;
  for (const auto& [I, g] : c_) r.c_.emplace(I, g * f);
  return r;
}

int DiffForm::compare(const DiffForm& o) const {
  if (degree_ != o.degree_) return degree_ < o.degree_ ? -1 : 1;
  auto a = c_.begin(), b = o.c_.begin();
  for (; a != c_.end() && b != o.c_.end(); ++a, ++b) {
    if (a->first != b->first) return a->first < b->first ? -1 : 1;
    int c = a->second.compare(b->second);
    if (c) return c;
  }
  if (a != c_.end()) return 1;
  if (b != o.c_.end()) return -1;
  return 0;
}

std::string DiffForm::to_string() const {
  if (c_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [I, f] : c_) {
    if (!first) s += " + ";
    first = false;
    std::string coef = f.to_string();
    bool simple = f.is_poly() && f.num().size() == 1;
    if (I == 0) {
      s += simple ? coef : "(" + coef + ")";
      continue;
    }
    if (!f.is_one()) s += (simple ? coef : "(" + coef + ")") + " * ";
    bool w = false;
    for (int i = 0; i < kMaxVars; ++i) {
      if (!((I >> i) & 1)) continue;
      if (w) s += " ^ ";
      s += "d(" + ctx_->name(i) + ")";
      w = true;
    }
  }
  return s;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
  require_same_context(a.ctx(), b.ctx());
  DiffForm r(a.ctx(), a.degree() + b.degree());
  for (const auto& [I, f] : a.terms())
    for (const auto& [J, g] : b.terms()) {
      int s = wedge_sign(I, J);
      if (s == 0) continue;
      RatFunc c = f * g;
      r += DiffForm::basis(s > 0 ? c : -c, I | J);
    }
  return r;
}

DiffForm form_d(const RatFunc& f) {
  DiffForm r(f.ctx(), 1);
  uint32_t vars = f.var_mask();
  for (int i = 0; i < f.ctx()->num_vars(); ++i)
    if ((vars >> i) & 1) r += DiffForm::basis(f.derivative(i), 1u << i);
  return r;
}

DiffForm form_d(const DiffForm& w) {
  DiffForm r(w.ctx(), w.degree() + 1);
  for (const auto& [I, f] : w.terms()) {
    uint32_t vars = f.var_mask();
    for (int i = 0; i < w.ctx()->num_vars(); ++i) {
      if (!((vars >> i) & 1) || ((I >> i) & 1)) continue;
      int s = wedge_sign(1u << i, I);
      RatFunc c = f.derivative(i);
      if (c.is_zero()) continue;
      r += DiffForm::basis(s > 0 ? c : -c, I | (1u << i));
    }
  }
  return r;
}

DiffForm form_dlog(const RatFunc& a, const std::vector<RatFunc>& b) {
  const Context& ctx = a.ctx();
  DiffForm acc = DiffForm::function(a);
  if (a.is_zero()) acc = DiffForm(ctx, 0);
  for (const auto& x : b) {
    if (x.is_zero()) throw Error(ErrorKind::ZeroArgument, "dlog of zero");
    require_same_context(ctx, x.ctx());
    acc = wedge(acc, form_d(x) * x.inverse());
  }
  return acc;
}

DiffForm inverse_cartier(const DiffForm& w) {
  uint32_t p = w.ctx()->p();
  DiffForm r(w.ctx(), w.degree());
  for (const auto& [I, f] : w.terms()) r += DiffForm::basis(f.frobenius() * monomial_of_mask(w.ctx(), I, p - 1), I);
  return r;
}

DiffForm cartier_formula(const DiffForm& w) {
  uint32_t p = w.ctx()->p();
  DiffForm r(w.ctx(), w.degree());
  for (const auto& [I, f] : w.terms()) {
    Exponents target{};
    for (int i = 0; i < kMaxVars; ++i)
      if ((I >> i) & 1) target[i] = static_cast<uint16_t>(p - 1);
    auto parts = rf_frobenius_decompose(f);
    auto it = parts.find(target);
    if (it != parts.end()) r += DiffForm::basis(it->second, I);
  }
  return r;
}

bool is_closed(const DiffForm& w) { return form_d(w).is_zero(); }

DiffForm cartier(const DiffForm& w) {
  if (!is_closed(w)) throw Error(ErrorKind::NotClosed, "Cartier operator needs a closed form");
  return cartier_formula(w);
}

bool is_logarithmic(const DiffForm& w) { return is_closed(w) && cartier_formula(w) == w; }

DiffForm form_homotopy(const DiffForm& w) {
  const Context& ctx = w.ctx();
  uint32_t p = ctx->p();
  int m = ctx->num_vars();
  DiffForm r(ctx, std::max(w.degree() - 1, 0));
  if (w.degree() == 0) return r;
  for (const auto& [I, f] : w.terms()) {
    for (const auto& [e, g] : rf_frobenius_decompose(f)) {
      RatFunc gp = g.frobenius();
      int before = 0;  // |I intersect [0, j)|
      for (int j = 0; j < m; ++j) {
        bool inI = (I >> j) & 1;
        if (inI && e[j] <= p - 2) {
          Exponents e2 = e;
          e2[j] = static_cast<uint16_t>(e2[j] + 1);
          RatFunc c = gp * RatFunc::from_poly(ctx, Poly::monomial(p, e2, fp::inv(e[j] + 1, p)));
          if (before & 1) c = -c;
          r += DiffForm::basis(c, I & ~(1u << j));
        }
        // Factors before j must be harmonic: 1 or x^(p-1) dx.
        bool harmonic = inI ? e[j] == p - 1 : e[j] == 0;
        if (!harmonic) break;
        if (inI) ++before;
      }
    }
  }
  return r;
}

DiffForm form_substitute(const DiffForm& w, int var, const RatFunc& value) {
  const Context& ctx = w.ctx();
  DiffForm dv = form_d(value);
  DiffForm r(ctx, w.degree());
  for (const auto& [I, f] : w.terms()) {
    RatFunc g = f.substitute(var, value);
    DiffForm acc = DiffForm::function(g);
    if (g.is_zero()) continue;
    for (int i = 0; i < kMaxVars; ++i) {
      if (!((I >> i) & 1)) continue;
      acc = wedge(acc, i == var ? dv : DiffForm::dx(ctx, i));
    }
    r += acc;
  }
  return r;
}

DiffForm log_terms_form(const Context& ctx, int degree, const std::vector<LogTerm>& parts) {
  DiffForm r(ctx, degree);
  for (const auto& t : parts) r += form_dlog(t.a.frobenius(), t.b);
  return r;
}

ClosedFormClassification classify_closed(const DiffForm& w) {
  ClosedFormClassification out;
  const Context& ctx = w.ctx();
  if (!is_closed(w)) return out;
  DiffForm c = cartier_formula(w);
  out.iterations = 1;
  if (c.is_zero()) {
    out.verdict = ClosedFormClassification::Verdict::Exact;
    out.antiderivative = form_homotopy(w);
  } else {
    out.verdict = ClosedFormClassification::Verdict::LogDecomposition;
    // g dx_I = (g x_I) dlog x_I, so Phi(C w) = sum (g x_I)^p dlog x_I.
    for (const auto& [I, g] : c.terms()) {
      LogTerm t{g * monomial_of_mask(ctx, I, 1), {}};
      for (int i = 0; i < kMaxVars; ++i)
        if ((I >> i) & 1) t.b.push_back(RatFunc::variable(ctx, i));
      out.log_parts.push_back(std::move(t));
    }
    out.antiderivative = form_homotopy(w - log_terms_form(ctx, w.degree(), out.log_parts));
  }
  // Follow w, Cw, C^2 w, ... while the iterates stay closed.
  std::vector<DiffForm> seen = {w};
  DiffForm cur = w;
  for (int k = 0; k < 64; ++k) {
    if (!is_closed(cur)) return out;
    DiffForm next = cartier_formula(cur);
    if (next == cur) {
      out.stable_part = cur;
      out.stable_after = k;
      return out;
    }
    for (const auto& s : seen)
      if (s == next) throw Error(ErrorKind::InternalLimit, "Cartier iteration is periodic without a fixed point");
    seen.push_back(next);
    cur = next;
  }
  throw Error(ErrorKind::InternalLimit, "Cartier iteration did not settle within 64 steps");
}

}  // namespace charp
