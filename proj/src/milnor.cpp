#include "charp/milnor.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "atoms.hpp"
#include "charp/errors.hpp"
#include "charp/fp.hpp"

namespace charp {

namespace {

uint64_t mod_of(__int128 c, uint64_t m) {
  __int128 r = c % static_cast<__int128>(m);
  if (r < 0) r += m;
  return static_cast<uint64_t>(r);
}

uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

bool is_power_of(uint64_t m, uint64_t p) {
  if (m < p) return false;
  while (m % p == 0) m /= p;
  return m == 1;
}

}  // namespace

bool EntriesLess::operator()(const std::vector<RatFunc>& a, const std::vector<RatFunc>& b) const {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i) {
    int c = a[i].compare(b[i]);
    if (c) return c < 0;
  }
  return false;
}

KSymbolSum::KSymbolSum(Context ctx, int degree, uint64_t modulus)
    : ctx_(std::move(ctx)), degree_(degree), m_(modulus) {
  if (modulus < 2) throw Error(ErrorKind::InvalidContext, "symbol modulus must be at least 2");
  if (degree < 0) throw Error(ErrorKind::IndexOutOfRange, "negative symbol degree");
}

KSymbolSum KSymbolSum::symbol(const Context& ctx, uint64_t modulus, std::vector<RatFunc> entries,
                              int64_t coeff) {
  KSymbolSum s(ctx, static_cast<int>(entries.size()), modulus);
  s.add(std::move(entries), coeff);
  return s;
}

void KSymbolSum::add(std::vector<RatFunc> entries, int64_t coeff) { add_reduced(std::move(entries), mod_of(coeff, m_)); }

void KSymbolSum::add_reduced(std::vector<RatFunc> entries, uint64_t coeff) {
  if (static_cast<int>(entries.size()) != degree_)
    throw Error(ErrorKind::LengthMismatch, "symbol has the wrong number of entries");
  for (const auto& b : entries) {
    require_same_context(ctx_, b.ctx());
    if (b.is_zero()) throw Error(ErrorKind::ZeroArgument, "symbol entry is zero");
  }
  coeff %= m_;
  if (coeff == 0) return;
  auto [it, inserted] = terms_.emplace(std::move(entries), coeff);
  if (!inserted) {
    it->second = (it->second + coeff) % m_;
    if (it->second == 0) terms_.erase(it);
  }
}

void KSymbolSum::check_compatible(const KSymbolSum& o) const {
  require_same_context(ctx_, o.ctx_);
  if (degree_ != o.degree_) throw Error(ErrorKind::LengthMismatch, "symbol sums of different degrees");
  if (m_ != o.m_) throw Error(ErrorKind::ModulusMismatch, "symbol sums with different moduli");
}

KSymbolSum KSymbolSum::operator+(const KSymbolSum& o) const {
  check_compatible(o);
  KSymbolSum r = *this;
  for (const auto& [e, c] : o.terms_) r.add_reduced(e, c);
  return r;
}

KSymbolSum KSymbolSum::operator-() const { return scale(-1); }

KSymbolSum KSymbolSum::operator-(const KSymbolSum& o) const { return *this + (-o); }

KSymbolSum KSymbolSum::scale(int64_t k) const {
  KSymbolSum r(ctx_, degree_, m_);
  uint64_t kk = mod_of(k, m_);
  for (const auto& [e, c] : terms_) r.add_reduced(e, mul_mod(c, kk, m_));
  return r;
}

bool KSymbolSum::operator==(const KSymbolSum& o) const {
  return degree_ == o.degree_ && m_ == o.m_ && terms_ == o.terms_;
}

std::string KSymbolSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    if (degree_ == 0) {
      os << c;
      continue;
    }
    if (c != 1) os << c << "*";
    os << "{";
    for (size_t i = 0; i < e.size(); ++i) os << (i ? ", " : "") << e[i].to_string();
    os << "}";
  }
  return os.str();
}

KSymbolSum k_cup(const KSymbolSum& a, const KSymbolSum& b) {
  require_same_context(a.ctx(), b.ctx());
  if (a.modulus() != b.modulus()) throw Error(ErrorKind::ModulusMismatch, "symbol sums with different moduli");
  KSymbolSum r(a.ctx(), a.degree() + b.degree(), a.modulus());
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) {
      std::vector<RatFunc> e = ea;
      e.insert(e.end(), eb.begin(), eb.end());
      r.add_reduced(std::move(e), mul_mod(ca, cb, a.modulus()));
    }
  return r;
}

KSymbolSum k_change_modulus(const KSymbolSum& s, uint64_t modulus) {
  if (modulus < 2 || s.modulus() % modulus != 0)
    throw Error(ErrorKind::ModulusMismatch, "new modulus must divide the old one");
  KSymbolSum r(s.ctx(), s.degree(), modulus);
  for (const auto& [e, c] : s.terms()) r.add_reduced(e, c % modulus);
  return r;
}

// ---------------------------------------------------------------------------
// Normal form

namespace {

constexpr int kGen = -1;  // the primitive root of F_p as an entry

struct Normalizer {
  Context ctx;
  uint32_t p;
  uint64_t m;
  uint64_t m_const;  // coefficients of symbols with a constant entry live mod this
  std::vector<RatFunc> atoms;
  std::map<std::vector<int>, int64_t> out;  // raw integer coefficients

  uint32_t dlog(uint32_t c) const { return fp::discrete_log(c, p); }

  void emit(std::vector<int> t, int64_t c) {
    // anticommutativity: sort, tracking the sign; equal atoms give {a, -1}
    for (int guard = 0; guard < 64; ++guard) {
      int consts = static_cast<int>(std::count(t.begin(), t.end(), kGen));
      if (consts >= 2) return;
      bool changed = false;
      for (size_t i = 1; i < t.size(); ++i)
        for (size_t j = i; j > 0 && t[j - 1] > t[j]; --j) {
          std::swap(t[j - 1], t[j]);
          c = -c;
        }
      for (size_t i = 1; i < t.size(); ++i) {
        if (t[i] != t[i - 1] || t[i] == kGen) continue;
        if (p == 2) return;
        // {a, a} = {a, -1} and -1 = g^((p-1)/2)
        t[i] = kGen;
        c = static_cast<int64_t>(mod_of(static_cast<__int128>(c) * ((p - 1) / 2) % static_cast<__int128>(m), m));
        changed = true;
        break;
      }
      if (changed) continue;
      // Steinberg on atoms: 1 - a = k b  =>  {a, b} = -{a, k}
      for (size_t i = 0; i < t.size() && !changed; ++i)
        for (size_t j = 0; j < t.size() && !changed; ++j) {
          if (i == j || t[i] == kGen || t[j] == kGen) continue;
          RatFunc rest = RatFunc::one(ctx) - atoms[t[i]];
          if (rest.is_zero()) continue;
          RatFunc k = rest / atoms[t[j]];
          if (!k.is_constant()) continue;
          t[j] = kGen;
          c = static_cast<int64_t>(mod_of(-static_cast<__int128>(c) * dlog(k.constant_value()) % static_cast<__int128>(m), m));
          changed = true;
        }
      if (changed) continue;
      break;
    }
    if (std::count(t.begin(), t.end(), kGen) >= 2) return;
    if (c == 0) return;
    out[t] = static_cast<int64_t>(mod_of(static_cast<__int128>(out[t]) + c, m));
  }
};

bool raw_steinberg(const std::vector<RatFunc>& e) {
  for (size_t i = 0; i < e.size(); ++i) {
    if (e[i].is_one()) return true;
    for (size_t j = i + 1; j < e.size(); ++j) {
      RatFunc s = e[i] + e[j];
      if (s.is_one() || s.is_zero()) return true;
    }
  }
  return false;
}

}  // namespace

KSymbolSum k_normalize(const KSymbolSum& s) {
  const Context& ctx = s.ctx();
  uint32_t p = ctx->p();
  uint64_t m = s.modulus();
  KSymbolSum result(ctx, s.degree(), m);
  if (s.degree() == 0) {
    for (const auto& [e, c] : s.terms()) result.add_reduced(e, c);
    return result;
  }
  std::vector<std::pair<const std::vector<RatFunc>*, uint64_t>> kept;
  std::vector<RatFunc> all;
  for (const auto& [e, c] : s.terms()) {
    if (raw_steinberg(e)) continue;
    kept.emplace_back(&e, c);
    all.insert(all.end(), e.begin(), e.end());
  }
  if (kept.empty()) return result;
  detail::AtomSplit split = detail::split_over_coprime_base(ctx, all);

  Normalizer nz{ctx, p, m, std::gcd<uint64_t>(m, p - 1), split.atoms, {}};
  size_t pos = 0;
  for (const auto& [ep, c] : kept) {
    // each entry as a list of (component, multiplicity)
    std::vector<std::vector<std::pair<int, int64_t>>> comps;
    for (size_t i = 0; i < ep->size(); ++i, ++pos) {
      const auto& ap = split.entries[pos];
      std::vector<std::pair<int, int64_t>> cs;
      if (ap.constant != 1) cs.emplace_back(kGen, static_cast<int64_t>(nz.dlog(ap.constant)));
      for (const auto& [idx, e] : ap.powers) cs.emplace_back(idx, e);
      comps.push_back(std::move(cs));
    }
    int64_t base = static_cast<int64_t>(c % m);
    std::vector<int> t(ep->size());
    std::function<void(size_t, int64_t)> rec = [&](size_t i, int64_t coeff) {
      if (coeff == 0) return;
      if (i == comps.size()) {
        nz.emit(t, coeff);
        return;
      }
      for (const auto& [idx, e] : comps[i]) {
        t[i] = idx;
        rec(i + 1, static_cast<int64_t>(mod_of(static_cast<__int128>(coeff) * e % static_cast<__int128>(m), m)));
      }
    };
    rec(0, base);
  }
  RatFunc g = RatFunc::constant(ctx, fp::primitive_root(p));
  for (const auto& [t, c] : nz.out) {
    bool has_const = std::find(t.begin(), t.end(), kGen) != t.end();
    uint64_t mod = has_const ? nz.m_const : m;
    uint64_t cc = mod_of(c, mod);
    if (cc == 0) continue;
    std::vector<RatFunc> e;
    for (int idx : t) e.push_back(idx == kGen ? g : split.atoms[idx]);
    result.add_reduced(std::move(e), cc);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Residues and specialization

namespace {

struct LocalEntry {
  int e;
  RatFunc unit_bar;
};

LocalEntry localize(const RatFunc& b, const DivisorValuation& v) {
  int e = rf_valuation(b, v);
  RatFunc u = b / v.uniformizer().pow(e);
  return {e, rf_reduce(u, v)};
}

// Sum over the choices of pi-part / unit part per entry. The callback gets
// the chosen pi positions and the coefficient product.
KSymbolSum residue_from_local(const Context& ctx, int degree, uint64_t m,
                              const std::vector<std::pair<std::vector<LocalEntry>, uint64_t>>& syms) {
  KSymbolSum r(ctx, std::max(degree - 1, 0), m);
  if (degree == 0) return r;
  RatFunc minus_one = RatFunc::constant(ctx, -1);
  for (const auto& [loc, c] : syms) {
    int n = static_cast<int>(loc.size());
    for (uint32_t S = 1; S < (1u << n); ++S) {
      int64_t coeff = static_cast<int64_t>(c % m);
      bool skip = false;
      for (int i = 0; i < n; ++i)
        if ((S >> i) & 1) {
          if (loc[i].e == 0) {
            skip = true;
            break;
          }
          coeff = static_cast<int64_t>(mod_of(static_cast<__int128>(coeff) * loc[i].e % static_cast<__int128>(m), m));
        }
      if (skip || coeff == 0) continue;
      int first = std::countr_zero(S);
      std::vector<RatFunc> rest;
      for (int i = 0; i < n; ++i) {
        if (i == first) continue;
        rest.push_back(((S >> i) & 1) ? minus_one : loc[i].unit_bar);
      }
      if (first % 2) coeff = -coeff;
      r.add(std::move(rest), coeff);
    }
  }
  return r;
}

}  // namespace

KSymbolSum k_residue(const KSymbolSum& s, const DivisorValuation& v) {
  require_same_context(s.ctx(), v.ctx());
  std::vector<std::pair<std::vector<LocalEntry>, uint64_t>> syms;
  for (const auto& [e, c] : s.terms()) {
    std::vector<LocalEntry> loc;
    for (const auto& b : e) loc.push_back(localize(b, v));
    syms.emplace_back(std::move(loc), c);
  }
  return k_normalize(residue_from_local(s.ctx(), s.degree(), s.modulus(), syms));
}

namespace {

KSymbolSum specialize_unchecked(const KSymbolSum& s, const DivisorValuation& v) {
  KSymbolSum r(s.ctx(), s.degree(), s.modulus());
  for (const auto& [e, c] : s.terms()) {
    std::vector<RatFunc> units;
    for (const auto& b : e) units.push_back(localize(b, v).unit_bar);
    r.add_reduced(std::move(units), c);
  }
  return k_normalize(r);
}

}  // namespace

KSymbolSum k_specialize(const KSymbolSum& s, const DivisorValuation& v) {
  require_same_context(s.ctx(), v.ctx());
  if (!k_residue(s, v).is_zero())
    throw Error(ErrorKind::RamifiedInput, "symbol sum is ramified at " + v.to_string());
  return specialize_unchecked(s, v);
}

DiffForm k_dlog(const KSymbolSum& s) {
  uint32_t p = s.ctx()->p();
  if (s.modulus() != p) throw Error(ErrorKind::ModulusNotP, "dlog needs modulus equal to the characteristic");
  DiffForm w(s.ctx(), s.degree());
  for (const auto& [e, c] : s.terms()) w += form_dlog(RatFunc::constant(s.ctx(), static_cast<int64_t>(c)), e);
  return w;
}

// ---------------------------------------------------------------------------
// Zero test

namespace {

bool all_entries_constant(const KSymbolSum& s) {
  for (const auto& [e, c] : s.terms())
    for (const auto& b : e)
      if (!b.is_constant()) return false;
  return true;
}

struct Places {
  int var = -1;
  std::vector<DivisorValuation> places;
};

// A variable in which every atom of the entries has degree at most one; the
// places are the zeros of the degree-one atoms and infinity.
std::optional<Places> degree_one_places(const KSymbolSum& s) {
  std::vector<RatFunc> all;
  for (const auto& [e, c] : s.terms()) all.insert(all.end(), e.begin(), e.end());
  detail::AtomSplit split = detail::split_over_coprime_base(s.ctx(), all);
  uint32_t mask = 0;
  for (const auto& a : split.atoms) mask |= a.var_mask();
  for (int var = kMaxVars - 1; var >= 0; --var) {
    if (!((mask >> var) & 1)) continue;
    bool ok = true;
    for (const auto& a : split.atoms)
      if (a.num().degree(var) > 1) ok = false;
    if (!ok) continue;
    Places out;
    out.var = var;
    for (const auto& a : split.atoms) {
      if (a.num().degree(var) != 1) continue;
      auto co = a.num().coefficients_in(var);
      RatFunc center = -RatFunc::fraction(s.ctx(), co[0], co[1]);
      auto v = DivisorValuation::at_function(var, center);
      if (std::find(out.places.begin(), out.places.end(), v) == out.places.end()) out.places.push_back(v);
    }
    out.places.push_back(DivisorValuation::at_infinity(s.ctx(), var));
    return out;
  }
  return std::nullopt;
}

struct MilnorEvidence {
  int var;
  std::vector<DivisorValuation> places;
  DivisorValuation special;
};

Verdict decide(const KSymbolSum& s);

Verdict decide_normalized(const KSymbolSum& n) {
  const Context& ctx = n.ctx();
  uint32_t p = ctx->p();
  uint64_t m = n.modulus();
  if (n.is_zero()) return Verdict::zero({"normal-form", "", "relations reduce the sum to 0", {}, {}});
  if (m == p) {
    DiffForm w = k_dlog(n);
    if (w.is_zero()) return Verdict::zero({"dlog", "", "dlog image vanishes", w, {}});
    return Verdict::nonzero({"dlog", "", w.to_string(), w, {}});
  }
  if (n.degree() == 0)
    return Verdict::nonzero({"coefficient", "", n.to_string() + " mod " + std::to_string(m), n, {}});
  if (all_entries_constant(n))
    return Verdict::nonzero({"constant-field", "", n.to_string() + " is not an m-th power in F_p*", n, {}});
  if (is_power_of(m, p)) {
    bool divisible = true;
    for (const auto& [e, c] : n.terms()) divisible &= c % p == 0;
    if (divisible) {
      KSymbolSum d(ctx, n.degree(), m / p);
      for (const auto& [e, c] : n.terms()) d.add_reduced(e, c / p);
      Verdict child = decide(d);
      Certificate cert{"divide-by-p", "", "sum = p * (" + d.to_string() + ")", d, {child.certificate}};
      return {child.status, cert};
    }
    KSymbolSum r = k_change_modulus(n, p);
    Verdict child = decide(r);
    if (child.status == Status::NonZero)
      return Verdict::nonzero({"reduction-mod-p", "", r.to_string(), r, {child.certificate}});
  }
  auto places = degree_one_places(n);
  if (!places) return Verdict::unknown({"unsupported-place", "", "no variable with degree-one places", {}, {}});
  Certificate cert{"milnor-sequence", ctx->name(places->var), "", {}, {}};
  bool unknown = false;
  for (const auto& v : places->places) {
    KSymbolSum r = k_residue(n, v);
    Verdict child = decide(r);
    child.certificate.place = v.to_string();
    if (child.status == Status::NonZero) {
      Certificate c{"residue", v.to_string(), r.to_string(), v, {child.certificate}};
      return Verdict::nonzero(c);
    }
    if (child.status == Status::Unknown) unknown = true;
    cert.children.push_back(child.certificate);
  }
  if (unknown) {
    cert.witness = "some residue undecided";
    return Verdict::unknown(cert);
  }
  DivisorValuation special = DivisorValuation::at(ctx, places->var, 0);
  KSymbolSum beta = specialize_unchecked(n, special);
  Verdict child = decide(beta);
  child.certificate.place = special.to_string();
  cert.children.push_back(child.certificate);
  cert.witness = "all residues vanish; constant part " + beta.to_string();
  cert.evidence = MilnorEvidence{places->var, places->places, special};
  return {child.status, cert};
}

Verdict decide(const KSymbolSum& s) { return decide_normalized(k_normalize(s)); }

}  // namespace

Verdict k_is_zero(const KSymbolSum& s) { return decide(s); }

// ---------------------------------------------------------------------------
// Independent re-check

namespace {

// dlog via d(b)/b and wedge products.
DiffForm dlog_by_wedge(const KSymbolSum& s) {
  DiffForm w(s.ctx(), s.degree());
  for (const auto& [e, c] : s.terms()) {
    DiffForm t = DiffForm::function(RatFunc::constant(s.ctx(), static_cast<int64_t>(c)));
    for (const auto& b : e) t = wedge(t, form_d(b) * b.inverse());
    w += t;
  }
  return w;
}

// Residue through leading Laurent coefficients in local coordinates.
KSymbolSum residue_by_laurent(const KSymbolSum& s, const DivisorValuation& v) {
  std::vector<std::pair<std::vector<LocalEntry>, uint64_t>> syms;
  for (const auto& [e, c] : s.terms()) {
    std::vector<LocalEntry> loc;
    for (const auto& b : e) {
      RatFunc bl = v.to_local(b);
      int k = local_valuation(bl, v.var());
      RatFunc lead = laurent_coefficients(bl, v.var(), k, k).at(0);
      loc.push_back({k, lead});
    }
    syms.emplace_back(std::move(loc), c);
  }
  return residue_from_local(s.ctx(), s.degree(), s.modulus(), syms);
}

bool constant_not_power(const KSymbolSum& s) {
  // degree one, constant entries: prod b^c must not be an m-th power
  uint32_t p = s.ctx()->p();
  if (s.degree() != 1) return false;
  uint64_t prod = 1;
  for (const auto& [e, c] : s.terms()) {
    if (!e[0].is_constant()) return false;
    prod = fp::mul(static_cast<uint32_t>(prod), fp::pow(e[0].constant_value(), c, p), p);
  }
  uint64_t g = std::gcd<uint64_t>(s.modulus(), p - 1);
  return fp::pow(static_cast<uint32_t>(prod), (p - 1) / g, p) != 1;
}

bool verify_cert(const KSymbolSum& s, Status status, const Certificate& c) {
  if (status == Status::Unknown) return false;
  const std::string& rule = c.rule;
  if (rule == "normal-form") return status == Status::Zero && k_normalize(s).is_zero();
  if (rule == "dlog") {
    if (s.modulus() != s.ctx()->p()) return false;
    DiffForm w = dlog_by_wedge(s);
    if (status == Status::Zero) return w.is_zero();
    const auto* ev = std::any_cast<DiffForm>(&c.evidence);
    return !w.is_zero() && ev && *ev == w;
  }
  if (rule == "coefficient") {
    if (status != Status::NonZero || s.degree() != 0) return false;
    uint64_t total = 0;
    for (const auto& [e, k] : s.terms()) total = (total + k) % s.modulus();
    return total != 0;
  }
  if (rule == "constant-field") {
    if (status != Status::NonZero) return false;
    if (constant_not_power(s)) return true;
    const auto* ev = std::any_cast<KSymbolSum>(&c.evidence);
    return ev && k_normalize(s) == *ev && constant_not_power(*ev);
  }
  if (rule == "divide-by-p") {
    const auto* d = std::any_cast<KSymbolSum>(&c.evidence);
    if (!d || c.children.size() != 1) return false;
    uint32_t p = s.ctx()->p();
    KSymbolSum lifted(s.ctx(), s.degree(), s.modulus());
    for (const auto& [e, k] : d->terms()) lifted.add_reduced(e, k * p);
    if (k_normalize(s - lifted).is_zero() == false) return false;
    return verify_cert(*d, status, c.children[0]);
  }
  if (rule == "reduction-mod-p") {
    const auto* r = std::any_cast<KSymbolSum>(&c.evidence);
    if (status != Status::NonZero || !r || c.children.size() != 1) return false;
    if (k_normalize(k_change_modulus(s, r->modulus()) - *r).is_zero() == false) return false;
    return verify_cert(*r, Status::NonZero, c.children[0]);
  }
  if (rule == "residue") {
    const auto* v = std::any_cast<DivisorValuation>(&c.evidence);
    if (status != Status::NonZero || !v || c.children.size() != 1) return false;
    return verify_cert(residue_by_laurent(s, *v), Status::NonZero, c.children[0]);
  }
  if (rule == "milnor-sequence") {
    const auto* ev = std::any_cast<MilnorEvidence>(&c.evidence);
    if (!ev || c.children.size() != ev->places.size() + 1) return false;
    auto places = degree_one_places(k_normalize(s));
    if (!places || places->var != ev->var) return false;
    for (const auto& v : places->places)
      if (std::find(ev->places.begin(), ev->places.end(), v) == ev->places.end()) return false;
    for (size_t i = 0; i < ev->places.size(); ++i)
      if (!verify_cert(residue_by_laurent(s, ev->places[i]), Status::Zero, c.children[i])) return false;
    return verify_cert(specialize_unchecked(s, ev->special), status, c.children.back());
  }
  return false;
}

}  // namespace

bool k_verify(const KSymbolSum& s, const Verdict& v) { return verify_cert(s, v.status, v.certificate); }

}  // namespace charp
