#include "charp/hsym.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "atoms.hpp"
#include "charp/errors.hpp"
#include "charp/fp.hpp"
#include "hsym_forms.hpp"

namespace charp {

using detail::analyze_place;
using detail::LocalAnalysis;

HSymbolSum::HSymbolSum(Context ctx, int degree, int length) : ctx_(std::move(ctx)), n_(degree), r_(length) {
  if (degree < 0) throw Error(ErrorKind::IndexOutOfRange, "negative symbol degree");
  if (length < 1 || length > kMaxWittLength) throw Error(ErrorKind::IndexOutOfRange, "Witt length out of range");
}

HSymbolSum HSymbolSum::symbol(const WittVector& w, std::vector<RatFunc> entries, int64_t coeff) {
  HSymbolSum s(w.ctx(), static_cast<int>(entries.size()), w.length());
  s.add(w, std::move(entries), coeff);
  return s;
}

HSymbolSum HSymbolSum::symbol(const RatFunc& a, std::vector<RatFunc> entries, int64_t coeff) {
  return symbol(WittVector(a.ctx(), {a}), std::move(entries), coeff);
}

void HSymbolSum::add(const WittVector& w, std::vector<RatFunc> entries, int64_t coeff) {
  require_same_context(ctx_, w.ctx());
  if (w.length() != r_) throw Error(ErrorKind::LengthMismatch, "Witt part of the wrong length");
  if (static_cast<int>(entries.size()) != n_) throw Error(ErrorKind::LengthMismatch, "wrong number of entries");
  for (const auto& b : entries) {
    require_same_context(ctx_, b.ctx());
    if (b.is_zero()) throw Error(ErrorKind::ZeroArgument, "symbol entry is zero");
  }
  WittVector v = coeff == 1 ? w : witt_scalar(coeff, w);
  if (v.is_zero()) return;
  auto it = terms_.find(entries);
  if (it == terms_.end()) {
    if (terms_.size() >= kMaxSymbolTerms) throw Error(ErrorKind::ResourceLimit, "symbol sum exceeds the term cap");
    terms_.emplace(std::move(entries), std::move(v));
    return;
  }
  it->second = witt_add(it->second, v);
  if (it->second.is_zero()) terms_.erase(it);
}

void HSymbolSum::check_compatible(const HSymbolSum& o) const {
  require_same_context(ctx_, o.ctx_);
  if (n_ != o.n_ || r_ != o.r_) throw Error(ErrorKind::LengthMismatch, "symbol sums of different shapes");
}

HSymbolSum HSymbolSum::operator+(const HSymbolSum& o) const {
  check_compatible(o);
  HSymbolSum r = *this;
  for (const auto& [e, w] : o.terms_) r.add(w, e);
  return r;
}

HSymbolSum HSymbolSum::operator-() const {
  HSymbolSum r(ctx_, n_, r_);
  for (const auto& [e, w] : terms_) r.terms_.emplace(e, witt_neg(w));
  return r;
}

HSymbolSum HSymbolSum::operator-(const HSymbolSum& o) const { return *this + (-o); }

HSymbolSum HSymbolSum::scale(int64_t k) const {
  HSymbolSum r(ctx_, n_, r_);
  for (const auto& [e, w] : terms_) r.add(w, e, k);
  return r;
}

bool HSymbolSum::operator==(const HSymbolSum& o) const { return n_ == o.n_ && r_ == o.r_ && terms_ == o.terms_; }

std::string HSymbolSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, w] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "[";
    for (int i = 0; i < w.length(); ++i) os << (i ? ", " : "") << w[i].to_string();
    if (n_ == 0) {
      os << "]";
      continue;
    }
    os << " | ";
    for (size_t i = 0; i < e.size(); ++i) os << (i ? ", " : "") << e[i].to_string();
    os << "}";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

// [V^k[a] | ..., c a, ...} with c constant.
bool diagonal(const WittVector& w, const std::vector<RatFunc>& entries) {
  int k = w.leading_zeros();
  if (k == w.length()) return true;
  for (int i = k + 1; i < w.length(); ++i)
    if (!w[i].is_zero()) return false;
  const RatFunc& a = w[k];
  for (const auto& b : entries)
    if ((b / a).is_constant()) return true;
  return false;
}

using SignedExp = std::array<int, kMaxVars>;

// Laurent polynomial: replaces c m^p by c m until no monomial but the
// constant is a p-th power.
RatFunc as_reduce_laurent(const RatFunc& a) {
  const Context& ctx = a.ctx();
  const int p = static_cast<int>(ctx->p());
  if (!a.den().is_monomial() || a.is_constant()) return a;
  const Exponents& de = a.den().leading().exp;
  std::map<SignedExp, uint32_t> mon;
  for (const auto& t : a.num().terms()) {
    SignedExp e{};
    for (int i = 0; i < kMaxVars; ++i) e[i] = static_cast<int>(t.exp[i]) - de[i];
    mon[e] = t.coeff;
  }
  bool changed = false;
  for (bool again = true; again;) {
    again = false;
    std::map<SignedExp, uint32_t> next;
    for (const auto& [e, c] : mon) {
      bool power = true, zero = true;
      for (int x : e) {
        if (x % p) power = false;
        if (x) zero = false;
      }
      SignedExp f = e;
      if (power && !zero) {
        for (int& x : f) x /= p;
        again = changed = true;
      }
      uint32_t& slot = next[f];
      slot = fp::add(slot, c, ctx->p());
      if (slot == 0) next.erase(f);
    }
    mon = std::move(next);
  }
  if (!changed) return a;
  RatFunc out = RatFunc::zero(ctx);
  for (const auto& [e, c] : mon) {
    RatFunc m = RatFunc::constant(ctx, c);
    for (int i = 0; i < kMaxVars; ++i)
      if (e[i]) m *= RatFunc::variable(ctx, i).pow(e[i]);
    out += m;
  }
  return out;
}

WittVector as_reduce(const WittVector& w) {
  const Context& ctx = w.ctx();
  WittVector cur = w;
  for (int guard = 0; guard < 64; ++guard) {
    std::vector<RatFunc> roots;
    bool all = true;
    for (const auto& c : cur.components()) {
      auto q = rf_pth_root(c);
      if (!q) {
        all = false;
        break;
      }
      roots.push_back(*q);
    }
    if (!all || roots == cur.components()) break;
    cur = WittVector(ctx, std::move(roots));
  }
  int k = cur.leading_zeros();
  if (k == cur.length() - 1) {
    auto c = cur.components();
    c.back() = as_reduce_laurent(c.back());
    cur = WittVector(ctx, std::move(c));
  }
  return cur;
}

// Sorts entries in place; returns the sign of the permutation.
int sort_entries(std::vector<RatFunc>& e) {
  int sign = 1;
  for (size_t i = 1; i < e.size(); ++i)
    for (size_t j = i; j > 0 && e[j] < e[j - 1]; --j) {
      std::swap(e[j], e[j - 1]);
      sign = -sign;
    }
  return sign;
}

HSymbolSum normalize_once(const HSymbolSum& s) {
  const Context& ctx = s.ctx();
  const int n = s.degree();
  HSymbolSum out(ctx, n, s.length());
  std::vector<std::pair<WittVector, std::vector<RatFunc>>> items;
  for (const auto& [e, w] : s.terms())
    if (!diagonal(w, e)) items.emplace_back(w, e);
  if (n == 0) {
    for (const auto& [w, e] : items) out.add(as_reduce(w), {});
    return out;
  }
  std::vector<RatFunc> all;
  for (const auto& [w, e] : items) all.insert(all.end(), e.begin(), e.end());
  detail::AtomSplit split = detail::split_over_coprime_base(ctx, all);
  size_t pos = 0;
  for (const auto& [w, e] : items) {
    std::vector<const detail::AtomPowers*> slots;
    size_t count = 1;
    for (int i = 0; i < n; ++i) {
      slots.push_back(&split.entries[pos++]);
      count *= slots.back()->powers.size();
      if (count > kMaxSymbolTerms) throw Error(ErrorKind::ResourceLimit, "entry splitting exceeds the term cap");
    }
    if (count == 0) continue;
    WittVector red = as_reduce(w);
    std::vector<size_t> idx(n, 0);
    for (size_t k = 0; k < count; ++k) {
      std::vector<RatFunc> chosen;
      std::vector<int> used;
      int64_t coeff = 1;
      for (int i = 0; i < n; ++i) {
        auto [atom, ex] = slots[i]->powers[idx[i]];
        used.push_back(atom);
        chosen.push_back(split.atoms[atom]);
        coeff *= ex;
      }
      std::sort(used.begin(), used.end());
      bool repeated = std::adjacent_find(used.begin(), used.end()) != used.end();
      if (!repeated) {
        coeff *= sort_entries(chosen);
        if (!diagonal(red, chosen)) out.add(red, chosen, coeff);
      }
      for (int i = n - 1; i >= 0; --i) {
        if (++idx[i] < slots[i]->powers.size()) break;
        idx[i] = 0;
      }
    }
  }
  return out;
}

int min_leading(const HSymbolSum& s) {
  int L = s.length();
  for (const auto& [e, w] : s.terms()) L = std::min(L, w.leading_zeros());
  return L;
}

HSymbolSum strip_leading(const HSymbolSum& s, int L) {
  if (L == 0) return s;
  HSymbolSum out(s.ctx(), s.degree(), s.length() - L);
  for (const auto& [e, w] : s.terms())
    out.add(WittVector(s.ctx(), std::vector<RatFunc>(w.components().begin() + L, w.components().end())), e);
  return out;
}

}  // namespace

HSymbolSum h_normalize(const HSymbolSum& s) {
  HSymbolSum cur = s;
  for (int round = 0; round < 16; ++round) {
    HSymbolSum next = normalize_once(cur);
    if (next == cur) return next;
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Truncation, multiplication, products

HSymbolSum h_truncate_pi(const HSymbolSum& s, int k) {
  if (k < 1 || k >= s.length()) throw Error(ErrorKind::IndexOutOfRange, "pi_k needs 1 <= k < r");
  HSymbolSum out(s.ctx(), s.degree(), s.length() - k);
  for (const auto& [e, w] : s.terms()) out.add(witt_truncate_pi(w, k), e);
  return out;
}

HSymbolSum h_shift_iota(const HSymbolSum& s, int r) {
  if (r < s.length() || r > kMaxWittLength) throw Error(ErrorKind::IndexOutOfRange, "iota needs s <= r");
  HSymbolSum out(s.ctx(), s.degree(), r);
  for (const auto& [e, w] : s.terms()) out.add(witt_shift_iota(w, r), e);
  return out;
}

HSymbolSum h_multiply_p(const HSymbolSum& s) {
  HSymbolSum out(s.ctx(), s.degree(), s.length());
  for (const auto& [e, w] : s.terms()) out.add(witt_pmul(w), e);
  return out;
}

HSymbolSum h_cup(const HSymbolSum& s, const KSymbolSum& k) {
  require_same_context(s.ctx(), k.ctx());
  uint64_t pr = 1;
  for (int i = 0; i < s.length(); ++i) pr *= s.ctx()->p();
  if (k.modulus() % pr) throw Error(ErrorKind::ModulusMismatch, "K-symbol modulus is not a multiple of p^r");
  HSymbolSum out(s.ctx(), s.degree() + k.degree(), s.length());
  for (const auto& [e, w] : s.terms())
    for (const auto& [f, c] : k.terms()) {
      std::vector<RatFunc> ent = e;
      ent.insert(ent.end(), f.begin(), f.end());
      out.add(w, ent, static_cast<int64_t>(c % pr));
    }
  return out;
}

DiffForm h_to_form(const HSymbolSum& s) {
  if (s.length() != 1) throw Error(ErrorKind::Unsupported, "forms represent classes of Witt length one");
  DiffForm w(s.ctx(), s.degree());
  for (const auto& [e, a] : s.terms()) w += form_dlog(a[0], e);
  return w;
}

HSymbolSum h_from_form(const DiffForm& w) {
  const Context& ctx = w.ctx();
  HSymbolSum out(ctx, w.degree(), 1);
  for (const auto& [M, f] : w.terms()) {
    std::vector<RatFunc> e;
    RatFunc a = f;
    for (uint32_t m = M; m; m &= m - 1) {
      RatFunc x = RatFunc::variable(ctx, std::countr_zero(m));
      e.push_back(x);
      a *= x;
    }
    out.add(WittVector(ctx, {a}), e);
  }
  return out;
}

std::optional<int> h_torsion_order_bound(const HSymbolSum& s) {
  HSymbolSum x = s;
  for (int k = 0; k <= s.length(); ++k) {
    Verdict v = h_is_zero(x);
    if (v.status == Status::Zero) return k;
    if (v.status == Status::Unknown) return std::nullopt;
    x = h_multiply_p(x);
  }
  return std::nullopt;
}

DivisorValuation place_of_polynomial(const RatFunc& f, int var) {
  if (!f.is_poly() || f.num().degree(var) != 1)
    throw Error(ErrorKind::UnsupportedResidueField, "only places of degree one in " + f.ctx()->name(var) + " are supported");
  auto co = f.num().coefficients_in(var);
  return DivisorValuation::at_function(var, -RatFunc::fraction(f.ctx(), co[0], co[1]));
}

// ---------------------------------------------------------------------------
// Local structure at a place

namespace {

bool integral(const WittVector& w, const DivisorValuation& v) {
  for (const auto& c : w.components())
    if (!c.is_zero() && rf_valuation(c, v) < 0) return false;
  return true;
}

bool all_integral(const HSymbolSum& s, const DivisorValuation& v) {
  for (const auto& [e, w] : s.terms())
    if (!integral(w, v)) return false;
  return true;
}

// Residue of a sum whose Witt parts are integral.
HSymbolSum residue_integral(const HSymbolSum& s, const DivisorValuation& v) {
  const Context& ctx = s.ctx();
  const int n = s.degree();
  HSymbolSum out(ctx, n - 1, s.length());
  RatFunc u = v.uniformizer();
  for (const auto& [e, w] : s.terms()) {
    std::vector<int> k;
    std::vector<RatFunc> ub;
    for (const auto& b : e) {
      k.push_back(rf_valuation(b, v));
      ub.push_back(rf_reduce(b / u.pow(k.back()), v));
    }
    std::vector<RatFunc> wc;
    for (const auto& c : w.components()) wc.push_back(c.is_zero() ? c : rf_reduce(c, v));
    WittVector wb(ctx, std::move(wc));
    for (int i = 0; i < n; ++i) {
      if (k[i] == 0) continue;
      std::vector<RatFunc> rest;
      for (int j = 0; j < n; ++j)
        if (j != i) rest.push_back(ub[j]);
      out.add(wb, rest, (i % 2 ? -1 : 1) * static_cast<int64_t>(k[i]));
    }
  }
  return out;
}

struct PlaceReduction {
  Status status = Status::Unknown;
  HSymbolSum tame;  // full length, integral Witt parts
  HSymbolSum head;  // the class examined last, after stripping
  LocalAnalysis analysis;
  std::string note;
};

struct TeichSplit {
  HSymbolSum first;  // length one
  HSymbolSum rest;   // same length, first slots zero
};

TeichSplit teich_split(const HSymbolSum& s) {
  const Context& ctx = s.ctx();
  const int r = s.length();
  TeichSplit t{HSymbolSum(ctx, s.degree(), 1), HSymbolSum(ctx, s.degree(), r)};
  for (const auto& [e, w] : s.terms()) {
    const RatFunc& a = w[0];
    if (a.is_zero()) {
      t.rest.add(w, e);
      continue;
    }
    t.first.add(WittVector(ctx, {a}), e);
    t.rest.add(witt_sub(w, WittVector::teichmuller(a, r)), e);
  }
  return t;
}

// [a] - F[u] + [u] when u^p - u = a.
std::optional<RatFunc> as_witness(const RatFunc& a) {
  try {
    return solve_artin_schreier(a);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ResourceLimit) throw;
    return std::nullopt;
  }
}

WittVector as_moved(const RatFunc& a, const RatFunc& u, int r) {
  return witt_add(witt_sub(WittVector::teichmuller(a, r), WittVector::teichmuller(u.pow(a.ctx()->p()), r)),
                  WittVector::teichmuller(u, r));
}

PlaceReduction reduce_at(const HSymbolSum& s, const DivisorValuation& v) {
  require_same_context(s.ctx(), v.ctx());
  const Context& ctx = s.ctx();
  const int n = s.degree(), r = s.length();
  PlaceReduction out;
  out.tame = HSymbolSum(ctx, n, r);
  HSymbolSum cur = h_normalize(s);
  for (;;) {
    if (cur.is_zero()) {
      out.status = Status::Zero;
      out.head = HSymbolSum(ctx, n, 1);
      out.analysis = analyze_place(DiffForm(ctx, n), v);
      return out;
    }
    cur = strip_leading(cur, min_leading(cur));
    const int len = cur.length();
    if (len == 1) {
      out.head = cur;
      out.analysis = analyze_place(h_to_form(cur), v);
      out.status = out.analysis.peels.empty() ? Status::Zero : Status::NonZero;
      return out;
    }
    TeichSplit t = teich_split(cur);
    out.head = t.first;
    out.analysis = analyze_place(h_to_form(t.first), v);
    if (!out.analysis.peels.empty()) {
      out.status = Status::NonZero;
      return out;
    }
    for (const auto& [e, a] : t.first.terms()) {
      WittVector ta = WittVector::teichmuller(a[0], len);
      if (integral(ta, v)) {
        out.tame.add(witt_shift_iota(ta, r), e);
      } else if (diagonal(ta, e)) {
        continue;
      } else if (auto u = as_witness(a[0])) {
        t.rest.add(as_moved(a[0], *u, len), e);
      } else {
        out.status = Status::Unknown;
        out.note = "first Witt slot " + a[0].to_string() + " is tame but not integral at " + v.to_string();
        return out;
      }
    }
    cur = h_normalize(t.rest);
  }
}

HSymbolSum pull_symbols(const HSymbolSum& s, int var, const RatFunc& value) {
  HSymbolSum out(s.ctx(), s.degree(), s.length());
  for (const auto& [e, w] : s.terms()) {
    std::vector<RatFunc> c, f;
    for (const auto& x : w.components()) c.push_back(x.substitute(var, value));
    for (const auto& b : e) f.push_back(b.substitute(var, value));
    out.add(WittVector(s.ctx(), std::move(c)), f);
  }
  return out;
}

}  // namespace

Verdict h_is_tame(const HSymbolSum& s, const DivisorValuation& v) {
  require_same_context(s.ctx(), v.ctx());
  if (all_integral(s, v)) return Verdict::zero({"integral", v.to_string(), "all Witt components are integral", {}, {}});
  PlaceReduction pr = reduce_at(s, v);
  if (pr.status == Status::Zero)
    return Verdict::zero({"tame-reduction", v.to_string(), "no graded class survives", {}, {}});
  if (pr.status == Status::Unknown) return Verdict::unknown({"tame-reduction", v.to_string(), pr.note, {}, {}});
  const auto& top = pr.analysis.peels.front();
  return Verdict::nonzero({"wild", v.to_string(), "level " + std::to_string(top.level) + ": " + top.phi.to_string(),
                           detail::WildEvidence{v, top.level, top.phi, top.phi_dt}, {}});
}

std::optional<bool> h_is_wild(const HSymbolSum& s, const DivisorValuation& v) {
  Verdict t = h_is_tame(s, v);
  if (t.status == Status::Unknown) return std::nullopt;
  return t.status == Status::NonZero;
}

HSymbolSum h_residue(const HSymbolSum& s, const DivisorValuation& v) {
  require_same_context(s.ctx(), v.ctx());
  if (s.degree() == 0) throw Error(ErrorKind::IndexOutOfRange, "residue of a class without entries");
  const int r = s.length();
  if (all_integral(s, v)) return h_normalize(residue_integral(s, v));
  PlaceReduction pr = reduce_at(s, v);
  if (pr.status == Status::NonZero) throw Error(ErrorKind::WildInput, "class is wild at " + v.to_string());
  if (pr.status == Status::Unknown) throw Error(ErrorKind::Unsupported, "tameness undecided: " + pr.note);
  HSymbolSum out = residue_integral(pr.tame, v);
  HSymbolSum head = all_integral(pr.head, v) ? residue_integral(pr.head, v) : h_from_form(pr.analysis.residue);
  return h_normalize(out + h_shift_iota(head, r));
}

HSymbolSum h_constant_lift(const HSymbolSum& c, const DivisorValuation& v) {
  require_same_context(c.ctx(), v.ctx());
  for (const auto& [e, w] : c.terms()) {
    for (const auto& x : w.components())
      if (x.involves(v.var())) throw Error(ErrorKind::ContextMismatch, "not a residue-field element: " + x.to_string());
    for (const auto& b : e)
      if (b.involves(v.var())) throw Error(ErrorKind::ContextMismatch, "not a residue-field element: " + b.to_string());
  }
  return c;
}

HSymbolSum h_reduce(const HSymbolSum& s, const DivisorValuation& v) {
  require_same_context(s.ctx(), v.ctx());
  HSymbolSum out(s.ctx(), s.degree(), s.length());
  for (const auto& [e, w] : s.terms()) {
    if (!integral(w, v)) throw Error(ErrorKind::RamifiedInput, "Witt part has a pole at " + v.to_string());
    std::vector<RatFunc> c, f;
    for (const auto& x : w.components()) c.push_back(x.is_zero() ? x : rf_reduce(x, v));
    for (const auto& b : e) {
      if (rf_valuation(b, v) != 0) throw Error(ErrorKind::RamifiedInput, "entry is not a unit at " + v.to_string());
      f.push_back(rf_reduce(b, v));
    }
    out.add(WittVector(s.ctx(), std::move(c)), f);
  }
  return h_normalize(out);
}

std::string FiltrationReport::to_string() const {
  std::string s = "at " + place.to_string() + ": level " + std::to_string(level);
  if (!wild) return s + " (tame)";
  s += ", class " + graded.to_string();
  if (!graded_dt.is_zero()) s += " ; dt/t ^ " + graded_dt.to_string();
  return s;
}

FiltrationReport h_filtration(const HSymbolSum& s, const DivisorValuation& v) {
  PlaceReduction pr = reduce_at(s, v);
  if (pr.status == Status::Unknown) throw Error(ErrorKind::Unsupported, "filtration undecided: " + pr.note);
  FiltrationReport rep;
  rep.place = v;
  rep.witt_length = 1;
  rep.graded = DiffForm(s.ctx(), s.degree());
  rep.graded_dt = DiffForm(s.ctx(), s.degree() - 1);
  if (pr.status == Status::NonZero) {
    const auto& top = pr.analysis.peels.front();
    rep.level = top.level;
    rep.graded = top.phi;
    rep.graded_dt = top.phi_dt;
    rep.wild = true;
  }
  return rep;
}

HSymbolSum SimpleFormDecomposition::recomposed() const {
  const Context& ctx = tame.ctx();
  const int n = tame.degree();
  HSymbolSum out(ctx, n, 1);
  RatFunc u = place.uniformizer();
  for (const auto& t : terms) {
    RatFunc ui = u.pow(-t.level);
    for (const auto& [M, f] : t.phi.terms()) {
      std::vector<RatFunc> e;
      RatFunc a = f * ui;
      for (uint32_t m = M; m; m &= m - 1) {
        e.push_back(RatFunc::variable(ctx, std::countr_zero(m)));
        a *= e.back();
      }
      out.add(WittVector(ctx, {a}), e);
    }
    if (n == 0) continue;
    for (const auto& [J, f] : t.phi_dt.terms()) {
      std::vector<RatFunc> e{u};
      RatFunc a = f * ui;
      for (uint32_t m = J; m; m &= m - 1) {
        e.push_back(RatFunc::variable(ctx, std::countr_zero(m)));
        a *= e.back();
      }
      out.add(WittVector(ctx, {a}), e);
    }
  }
  return h_shift_iota(out, tame.length());
}

SimpleFormDecomposition h_simple_form(const HSymbolSum& s, const DivisorValuation& v) {
  require_same_context(s.ctx(), v.ctx());
  const Context& ctx = s.ctx();
  SimpleFormDecomposition out;
  out.place = v;
  HSymbolSum cur = h_normalize(s);
  if (cur.is_zero()) {
    out.tame = HSymbolSum(ctx, s.degree(), s.length());
    return out;
  }
  cur = strip_leading(cur, min_leading(cur));
  if (cur.length() != 1) throw Error(ErrorKind::Unsupported, "simple form needs a class of Witt length one");
  LocalAnalysis a = analyze_place(h_to_form(cur), v);
  for (const auto& pl : a.peels) out.terms.push_back({pl.level, pl.phi, pl.phi_dt});
  HSymbolSum loc = h_from_form(a.local_tame);
  out.tame = h_normalize(h_shift_iota(pull_symbols(loc, v.var(), v.from_local(RatFunc::variable(ctx, v.var()))), s.length()));
  return out;
}

Verdict h_is_unramified(const HSymbolSum& s, const DivisorValuation& v) {
  Verdict t = h_is_tame(s, v);
  if (t.status != Status::Zero) return t;
  if (s.degree() == 0) return Verdict::zero({"tame-degree-one", v.to_string(), "tame classes without entries are unramified", {}, {t.certificate}});
  HSymbolSum res = h_residue(s, v);
  Verdict z = h_is_zero(res);
  Certificate c{"residue", v.to_string(), res.to_string(), res, {t.certificate, z.certificate}};
  return {z.status, c};
}

// ---------------------------------------------------------------------------
// Zero test

namespace {

struct LiftMove {
  std::vector<RatFunc> entries;
  std::optional<RatFunc> as_root;  // none: diagonal relation
};

Verdict hzero(const HSymbolSum& s) {
  const Context& ctx = s.ctx();
  if (s.length() == 1) {
    DiffForm w = h_to_form(s);
    Verdict v = detail::form_is_zero(w);
    return {v.status, {"dlog-form", "", w.to_string(), {}, {v.certificate}}};
  }
  HSymbolSum nrm = h_normalize(s);
  if (nrm.is_zero()) return Verdict::zero({"normal-form", "", "relations reduce the sum to 0", {}, {}});
  int L = min_leading(nrm);
  if (L > 0) {
    Verdict child = hzero(strip_leading(nrm, L));
    return {child.status, {"iota", "", "first " + std::to_string(L) + " Witt slots vanish", L, {child.certificate}}};
  }
  TeichSplit t = teich_split(nrm);
  Verdict first = hzero(t.first);
  if (first.status == Status::NonZero)
    return Verdict::nonzero({"truncation", "", "first Witt slot class " + t.first.to_string(), {}, {first.certificate}});
  if (first.status == Status::Unknown)
    return Verdict::unknown({"truncation", "", "first Witt slot class undecided", {}, {first.certificate}});
  std::vector<LiftMove> moves;
  HSymbolSum rest = t.rest;
  for (const auto& [e, a] : t.first.terms()) {
    WittVector ta = WittVector::teichmuller(a[0], nrm.length());
    if (diagonal(ta, e)) {
      moves.push_back({e, std::nullopt});
    } else if (auto u = as_witness(a[0])) {
      moves.push_back({e, *u});
      rest.add(as_moved(a[0], *u, nrm.length()), e);
    } else {
      return Verdict::unknown({"p-division-witness", "", "no symbol-level lift for [" + a[0].to_string() + "]", {}, {first.certificate}});
    }
  }
  Verdict child = hzero(rest);
  (void)ctx;
  return {child.status, {"teichmuller-lift", "", std::to_string(moves.size()) + " first-slot terms moved", moves, {child.certificate}}};
}

DiffForm form_by_wedge(const HSymbolSum& s) {
  DiffForm w(s.ctx(), s.degree());
  for (const auto& [e, a] : s.terms()) {
    DiffForm t = DiffForm::function(a[0]);
    for (const auto& b : e) t = wedge(t, form_d(b) * b.inverse());
    w += t;
  }
  return w;
}

bool hverify(const HSymbolSum& s, Status st, const Certificate& c) {
  if (st == Status::Unknown) return false;
  const std::string& rule = c.rule;
  if (rule == "dlog-form") {
    if (s.length() != 1 || c.children.size() != 1) return false;
    return detail::form_verify(form_by_wedge(s), {st, c.children[0]});
  }
  if (rule == "normal-form") return st == Status::Zero && h_normalize(s).is_zero();
  if (rule == "iota") {
    const int* L = std::any_cast<int>(&c.evidence);
    if (!L || c.children.size() != 1) return false;
    HSymbolSum nrm = h_normalize(s);
    if (min_leading(nrm) < *L) return false;
    return hverify(strip_leading(nrm, *L), st, c.children[0]);
  }
  if (rule == "truncation") {
    if (st != Status::NonZero || c.children.size() != 1) return false;
    HSymbolSum nrm = h_normalize(s);
    if (nrm.length() < 2 || min_leading(nrm) != 0) return false;
    return hverify(teich_split(nrm).first, Status::NonZero, c.children[0]);
  }
  if (rule == "teichmuller-lift") {
    const auto* moves = std::any_cast<std::vector<LiftMove>>(&c.evidence);
    if (!moves || c.children.size() != 1) return false;
    HSymbolSum nrm = h_normalize(s);
    if (nrm.length() < 2 || min_leading(nrm) != 0) return false;
    TeichSplit t = teich_split(nrm);
    if (t.first.size() != moves->size()) return false;
    HSymbolSum rest = t.rest;
    for (const auto& m : *moves) {
      auto it = t.first.terms().find(m.entries);
      if (it == t.first.terms().end()) return false;
      const RatFunc& a = it->second[0];
      if (!m.as_root) {
        if (!diagonal(WittVector::teichmuller(a, nrm.length()), m.entries)) return false;
        continue;
      }
      if (m.as_root->pow(s.ctx()->p()) - *m.as_root != a) return false;
      rest.add(as_moved(a, *m.as_root, nrm.length()), m.entries);
    }
    return hverify(rest, st, c.children[0]);
  }
  return false;
}

}  // namespace

Verdict h_is_zero(const HSymbolSum& s) { return hzero(s); }

bool h_verify(const HSymbolSum& s, const Verdict& v) { return hverify(s, v.status, v.certificate); }

}  // namespace charp
