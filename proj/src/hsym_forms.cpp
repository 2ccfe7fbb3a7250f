#include "hsym_forms.hpp"

#include <algorithm>
#include <bit>
#include <functional>

#include "atoms.hpp"
#include "charp/errors.hpp"
#include "charp/fp.hpp"

namespace charp::detail {

DiffForm FormWitness::value() const {
  DiffForm r = inverse_cartier(rho) - rho;
  if (tau.degree() >= 0 && !tau.is_zero()) r += form_d(tau);
  return r;
}

FormWitness FormWitness::operator+(const FormWitness& o) const { return {tau + o.tau, rho + o.rho}; }

FormWitness empty_witness(const Context& ctx, int degree) { return {DiffForm(ctx, degree - 1), DiffForm(ctx, degree)}; }

namespace {

using Levels = std::map<int, std::pair<DiffForm, DiffForm>, std::greater<>>;

std::pair<DiffForm, DiffForm>& slot(Levels& lv, const Context& ctx, int n, int i) {
  auto it = lv.find(i);
  if (it == lv.end()) it = lv.emplace(i, std::make_pair(DiffForm(ctx, n), DiffForm(ctx, n - 1))).first;
  return it->second;
}

int dt_sign(uint32_t J, int var) { return (std::popcount(J & ((1u << var) - 1)) & 1) ? -1 : 1; }

// Makes cand.value() equal to target by adding an antiderivative of the
// difference, which must be exact.
FormWitness fix_exact(FormWitness cand, const DiffForm& target) {
  DiffForm delta = target - cand.value();
  if (delta.is_zero()) return cand;
  if (delta.degree() == 0) throw Error(ErrorKind::InternalLimit, "witness transport left a function");
  DiffForm h = form_homotopy(delta);
  if (form_d(h) != delta) throw Error(ErrorKind::InternalLimit, "witness transport left a non-exact form");
  cand.tau += h;
  return cand;
}

DiffForm dlog_local(const Context& ctx, int var) {
  return DiffForm::dx(ctx, var) * RatFunc::variable(ctx, var).inverse();
}

}  // namespace

LocalAnalysis analyze_place(const DiffForm& w, const DivisorValuation& v) {
  const Context& ctx = w.ctx();
  require_same_context(ctx, v.ctx());
  const int var = v.var(), n = w.degree();
  const uint32_t p = ctx->p(), bit = 1u << var;
  const RatFunc X = RatFunc::variable(ctx, var);
  DiffForm wl = form_substitute(w, var, v.to_local(X));

  Levels lv;
  DiffForm polar_l(ctx, n);
  for (const auto& [M, f] : wl.terms()) {
    int k0 = local_valuation(f, var);
    if (k0 >= 0) continue;
    auto co = laurent_coefficients(f, var, k0, -1);
    for (int e = k0; e < 0; ++e) {
      const RatFunc& c = co[e - k0];
      if (c.is_zero()) continue;
      polar_l += DiffForm::basis(c * X.pow(e), M);
      if (M & bit) {
        uint32_t J = M & ~bit;
        slot(lv, ctx, n, -e - 1).second += DiffForm::basis(dt_sign(J, var) > 0 ? c : -c, J);
      } else {
        slot(lv, ctx, n, -e).first += DiffForm::basis(c, M);
      }
    }
  }

  LocalAnalysis out;
  out.place = v;
  FormWitness wit = empty_witness(ctx, n);
  const DiffForm dXX = dlog_local(ctx, var);
  for (auto it = lv.begin(); it != lv.end() && it->first > 0; ++it) {
    const int i = it->first;
    DiffForm phi = it->second.first, phd = it->second.second;
    RatFunc Xi = X.pow(-i);
    if (i % p) {
      DiffForm g = phi;
      if (n >= 1 && !phd.is_zero()) {
        RatFunc inv = RatFunc::constant(ctx, fp::inv(static_cast<uint32_t>(i % p), p));
        g += form_d(phd) * inv;
        wit.tau -= phd * (Xi * inv);
      }
      if (!g.is_zero()) out.peels.push_back({i, g, DiffForm(ctx, n - 1)});
      continue;
    }
    const int j = i / static_cast<int>(p);
    RatFunc Xj = X.pow(-j);
    DiffForm rest(ctx, n), rest_dt(ctx, n - 1);
    if (!phi.is_zero()) {
      if (is_closed(phi)) {
        DiffForm c = cartier(phi);
        DiffForm diff = phi - inverse_cartier(c);
        if (n >= 1 && !diff.is_zero()) wit.tau += form_homotopy(diff) * Xi;
        wit.rho += c * Xj;
        slot(lv, ctx, n, j).first += c;
      } else {
        rest = phi;
      }
    }
    if (n >= 1 && !phd.is_zero()) {
      if (is_closed(phd)) {
        DiffForm c = cartier(phd);
        DiffForm diff = phd - inverse_cartier(c);
        if (n >= 2 && !diff.is_zero()) wit.tau -= wedge(dXX, form_homotopy(diff)) * Xi;
        wit.rho += wedge(dXX, c) * Xj;
        slot(lv, ctx, n, j).second += c;
      } else {
        rest_dt = phd;
      }
    }
    if (!rest.is_zero() || !rest_dt.is_zero()) out.peels.push_back({i, rest, rest_dt});
  }

  out.residue = DiffForm(ctx, n - 1);
  if (auto it = lv.find(0); it != lv.end()) out.residue = it->second.second;
  out.local_tame = wl - polar_l;
  if (n >= 1) out.local_tame += wedge(dXX, out.residue);

  const RatFunc back = v.from_local(X);
  auto pull = [&](const DiffForm& f) { return form_substitute(f, var, back); };
  out.polar = pull(polar_l);
  FormWitness g{pull(wit.tau), pull(wit.rho)};
  out.witness = fix_exact(g, pull(wit.value()));
  return out;
}

DiffForm peel_form(const LocalPeel& peel, const DivisorValuation& v) {
  const Context& ctx = v.ctx();
  const int var = v.var();
  const RatFunc X = RatFunc::variable(ctx, var);
  RatFunc Xi = X.pow(-peel.level);
  DiffForm loc = peel.phi * Xi;
  if (peel.phi.degree() >= 1 && !peel.phi_dt.is_zero()) loc += wedge(dlog_local(ctx, var), peel.phi_dt) * Xi;
  return form_substitute(loc, var, v.from_local(X));
}

// ---------------------------------------------------------------------------
// Zero test over the tower

namespace {

// Degree-one places in var carrying the zeros of the atoms, or nullopt when
// some atom has a factor of higher degree in var.
std::optional<std::vector<RatFunc>> linear_centers(const Context& ctx, const std::vector<RatFunc>& atoms, int var) {
  uint32_t p = ctx->p();
  std::vector<RatFunc> centers;
  auto add = [&](const RatFunc& c) {
    if (std::find(centers.begin(), centers.end(), c) == centers.end()) centers.push_back(c);
  };
  auto add_linear = [&](const Poly& s) {
    auto co = s.coefficients_in(var);
    add(-RatFunc::fraction(ctx, co[0], co[1]));
  };
  for (const auto& a : atoms) {
    Poly A = a.num();
    if (!A.involves(var)) continue;
    A = divide_or_throw(A, content_in(A, var));
    for (uint32_t c = 0; c < p; ++c) {
      Poly lin = Poly::variable(p, var) - Poly::constant(p, c);
      bool hit = false;
      while (A.degree(var) >= 1 && A.evaluate(var, c).is_zero()) {
        A = divide_or_throw(A, lin);
        hit = true;
      }
      if (hit) add(RatFunc::constant(ctx, c));
    }
    while (A.degree(var) >= 1) {
      if (A.degree(var) == 1) {
        add_linear(A);
        break;
      }
      Poly D = A.derivative(var);
      if (D.is_zero()) {
        auto r = pth_root(A);
        if (!r) return std::nullopt;
        A = *r;
        continue;
      }
      Poly G = gcd(A, D);
      Poly S = divide_or_throw(A, G);
      if (S.degree(var) > 1) return std::nullopt;
      if (S.degree(var) == 1) {
        add_linear(S);
        while (auto q = divide_exact(G, S)) G = std::move(*q);
      }
      if (!G.involves(var)) break;
      A = divide_or_throw(G, content_in(G, var));
    }
  }
  return centers;
}

struct TowerStep {
  int var;
  std::vector<DivisorValuation> finite;
};

std::optional<TowerStep> choose_step(const DiffForm& w) {
  const Context& ctx = w.ctx();
  std::vector<RatFunc> dens;
  for (const auto& [I, f] : w.terms())
    if (!f.den().is_constant()) dens.push_back(RatFunc::from_poly(ctx, f.den()));
  std::vector<RatFunc> atoms;
  if (!dens.empty()) atoms = split_over_coprime_base(ctx, dens).atoms;
  uint32_t mask = w.var_mask();
  for (int var = kMaxVars - 1; var >= 0; --var) {
    if (!((mask >> var) & 1)) continue;
    auto centers = linear_centers(ctx, atoms, var);
    if (!centers) continue;
    TowerStep s{var, {}};
    for (const auto& c : *centers) s.finite.push_back(DivisorValuation::at_function(var, c));
    return s;
  }
  return std::nullopt;
}

std::string peel_text(const LocalPeel& pl) {
  std::string s = "level " + std::to_string(pl.level) + ": " + pl.phi.to_string();
  if (!pl.phi_dt.is_zero()) s += " ; dt/t ^ " + pl.phi_dt.to_string();
  return s;
}

Verdict decide(const DiffForm& w) {
  const Context& ctx = w.ctx();
  const int n = w.degree();
  if (w.is_zero()) return Verdict::zero({"form-zero", "", "0", empty_witness(ctx, n), {}});
  if (w.var_mask() == 0)
    return Verdict::nonzero({"constant-field", "", w.to_string() + " is not of the form c^p - c in F_p", {}, {}});

  auto step = choose_step(w);
  if (!step) return Verdict::unknown({"unsupported-place", "", "no variable whose poles are degree-one places", {}, {}});
  const int var = step->var;

  std::vector<LocalAnalysis> an;
  DiffForm rest = w;
  for (const auto& v : step->finite) {
    an.push_back(analyze_place(w, v));
    rest -= an.back().polar;
  }
  for (const auto& [I, f] : rest.terms())
    if (f.den().involves(var))
      return Verdict::unknown({"partial-fractions", ctx->name(var), "polar parts did not exhaust the poles", {}, {}});
  an.push_back(analyze_place(rest, DivisorValuation::at_infinity(ctx, var)));
  DiffForm c0 = rest - an.back().polar;
  if ((c0.var_mask() >> var) & 1)
    return Verdict::unknown({"partial-fractions", ctx->name(var), "constant part still involves the variable", {}, {}});

  for (const auto& a : an)
    if (!a.peels.empty()) {
      const LocalPeel& top = a.peels.front();
      return Verdict::nonzero({"wild", a.place.to_string(), peel_text(top),
                               WildEvidence{a.place, top.level, top.phi, top.phi_dt}, {}});
    }

  Certificate cert{"tower", ctx->name(var), "", {}, {}};
  FormWitness total = empty_witness(ctx, n);
  for (const auto& a : an) total = total + a.witness;
  bool unknown = false;
  for (const auto& a : an) {
    if (n == 0 || a.residue.is_zero()) continue;
    Verdict child = decide(a.residue);
    child.certificate.place = a.place.to_string();
    if (child.status == Status::NonZero)
      return Verdict::nonzero({"residue", a.place.to_string(), a.residue.to_string(),
                               ResidueEvidence{a.place, a.residue}, {child.certificate}});
    if (child.status == Status::Unknown) {
      unknown = true;
      cert.children.push_back(child.certificate);
      continue;
    }
    const auto& cw = std::any_cast<const FormWitness&>(child.certificate.evidence);
    DiffForm dl = form_dlog(RatFunc::one(ctx), {a.place.uniformizer()});
    FormWitness lifted{-wedge(dl, cw.tau), wedge(dl, cw.rho)};
    if (n == 1) lifted.tau = DiffForm(ctx, 0);
    total = total + fix_exact(lifted, wedge(dl, a.residue));
    cert.children.push_back(child.certificate);
  }
  if (unknown) {
    cert.witness = "some residue undecided";
    return Verdict::unknown(cert);
  }
  Verdict child = decide(c0);
  child.certificate.place = "constant part";
  cert.children.push_back(child.certificate);
  if (child.status == Status::Zero) {
    total = total + std::any_cast<const FormWitness&>(child.certificate.evidence);
    cert.witness = "tame everywhere, residues and constant part vanish";
    cert.evidence = total;
    return Verdict::zero(cert);
  }
  if (child.status == Status::NonZero) {
    cert.rule = "tower-constant";
    cert.witness = "constant part " + c0.to_string();
    cert.evidence = ConstantEvidence{var, c0, total};
    return Verdict::nonzero(cert);
  }
  cert.witness = "constant part undecided";
  return Verdict::unknown(cert);
}

}  // namespace

Verdict form_is_zero(const DiffForm& w) { return decide(w); }

// ---------------------------------------------------------------------------
// Independent re-check

std::map<int, std::pair<DiffForm, DiffForm>> expand_by_peeling(const DiffForm& w, const DivisorValuation& v) {
  const Context& ctx = w.ctx();
  const int var = v.var(), n = w.degree();
  const uint32_t bit = 1u << var;
  const RatFunc u = v.uniformizer();
  DiffForm A(ctx, n);
  std::vector<std::pair<RatFunc, uint32_t>> B;
  for (const auto& [M, f] : w.terms()) {
    if (!(M & bit)) {
      A += DiffForm::basis(f, M);
      continue;
    }
    uint32_t J = M & ~bit;
    RatFunc g = dt_sign(J, var) > 0 ? f : -f;
    if (v.is_infinite()) {
      B.emplace_back(-g * u.pow(-2), J);
    } else {
      // dx = du + dc
      A += wedge(form_d(v.center()), DiffForm::basis(g, J));
      B.emplace_back(g, J);
    }
  }
  std::map<int, std::pair<DiffForm, DiffForm>> out;
  auto at = [&](int i) -> std::pair<DiffForm, DiffForm>& {
    auto it = out.find(i);
    if (it == out.end()) it = out.emplace(i, std::make_pair(DiffForm(ctx, n), DiffForm(ctx, n - 1))).first;
    return it->second;
  };
  for (const auto& [M, f] : A.terms()) {
    RatFunc g = f;
    while (!g.is_zero()) {
      int k = rf_valuation(g, v);
      if (k >= 0) break;
      RatFunc lead = rf_reduce(g * u.pow(-k), v);
      at(-k).first += DiffForm::basis(lead, M);
      g -= lead * u.pow(k);
    }
  }
  for (const auto& [f, J] : B) {
    RatFunc g = f;
    while (!g.is_zero()) {
      int k = rf_valuation(g, v);
      if (k >= 0) break;
      RatFunc lead = rf_reduce(g * u.pow(-k), v);
      at(-k - 1).second += DiffForm::basis(lead, J);
      g -= lead * u.pow(k);
    }
  }
  return out;
}

namespace {

struct Replay {
  int level = 0;
  DiffForm phi, phi_dt, residue;
};

Replay replay(const DiffForm& w, const DivisorValuation& v) {
  const Context& ctx = w.ctx();
  const int n = w.degree();
  const uint32_t p = ctx->p();
  auto lv = expand_by_peeling(w, v);
  std::map<int, std::pair<DiffForm, DiffForm>, std::greater<>> levels(lv.begin(), lv.end());
  for (auto it = levels.begin(); it != levels.end() && it->first > 0; ++it) {
    int i = it->first;
    auto [phi, phd] = it->second;
    if (i % p) {
      DiffForm g = phi;
      if (n >= 1) g += form_d(phd) * RatFunc::constant(ctx, fp::inv(static_cast<uint32_t>(i % p), p));
      if (!g.is_zero()) return {i, g, DiffForm(ctx, n - 1), {}};
      continue;
    }
    bool closed = is_closed(phi) && (n == 0 || is_closed(phd));
    if (!closed) return {i, phi, phd, {}};
    auto& low = levels.try_emplace(i / static_cast<int>(p), DiffForm(ctx, n), DiffForm(ctx, n - 1)).first->second;
    low.first += cartier_formula(phi);
    if (n >= 1) low.second += cartier_formula(phd);
  }
  Replay r{0, DiffForm(ctx, n), DiffForm(ctx, n - 1), DiffForm(ctx, n - 1)};
  if (auto it = levels.find(0); it != levels.end()) r.residue = it->second.second;
  return r;
}

bool verify_cert(const DiffForm& w, Status st, const Certificate& c) {
  if (st == Status::Unknown) return false;
  const std::string& rule = c.rule;
  if (rule == "form-zero") return st == Status::Zero && w.is_zero();
  if (rule == "constant-field") return st == Status::NonZero && w.degree() == 0 && w.var_mask() == 0 && !w.is_zero();
  if (rule == "tower") {
    const auto* ev = std::any_cast<FormWitness>(&c.evidence);
    return st == Status::Zero && ev && ev->value() == w;
  }
  if (rule == "tower-constant") {
    const auto* ev = std::any_cast<ConstantEvidence>(&c.evidence);
    if (st != Status::NonZero || !ev || c.children.empty()) return false;
    if ((ev->constant.var_mask() >> ev->var) & 1) return false;
    if (w - ev->constant != ev->witness.value()) return false;
    return verify_cert(ev->constant, Status::NonZero, c.children.back());
  }
  if (rule == "wild") {
    const auto* ev = std::any_cast<WildEvidence>(&c.evidence);
    if (st != Status::NonZero || !ev) return false;
    Replay r = replay(w, ev->place);
    if (r.level != ev->level || r.level == 0) return false;
    uint32_t p = w.ctx()->p();
    if (r.level % static_cast<int>(p)) return !r.phi.is_zero() && r.phi == ev->phi;
    bool closed = is_closed(ev->phi) && (w.degree() == 0 || is_closed(ev->phi_dt));
    return !closed && is_closed(r.phi - ev->phi) && (w.degree() == 0 || is_closed(r.phi_dt - ev->phi_dt));
  }
  if (rule == "residue") {
    const auto* ev = std::any_cast<ResidueEvidence>(&c.evidence);
    if (st != Status::NonZero || !ev || c.children.size() != 1) return false;
    Replay r = replay(w, ev->place);
    if (r.level != 0 || r.residue != ev->residue) return false;
    return verify_cert(ev->residue, Status::NonZero, c.children[0]);
  }
  return false;
}

}  // namespace

bool form_verify(const DiffForm& w, const Verdict& v) { return verify_cert(w, v.status, v.certificate); }

}  // namespace charp::detail
