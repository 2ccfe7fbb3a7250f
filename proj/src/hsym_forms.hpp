#pragma once

#include <map>
#include <vector>

#include "charp/forms.hpp"
#include "charp/valuation.hpp"
#include "charp/verdict.hpp"

// The r = 1 engine: H^{n+1}_p(F) = Omega^n / (d Omega^{n-1} + (Phi - 1) Omega^n).

namespace charp::detail {

// Stands for d(tau) + Phi(rho) - rho.
struct FormWitness {
  DiffForm tau;
  DiffForm rho;

  DiffForm value() const;
  FormWitness operator+(const FormWitness& o) const;
};

FormWitness empty_witness(const Context& ctx, int degree);

struct LocalPeel {
  int level;
  DiffForm phi;
  DiffForm phi_dt;
};

// Expansion of w at v with the graded classes peeled from the top level down.
// In global coordinates, with u the uniformizer:
//   polar = sum_peels (u^-i phi + u^-i dlog(u) ^ phi') + witness + dlog(u) ^ residue
// and w - polar is integral at v.
struct LocalAnalysis {
  DivisorValuation place;
  std::vector<LocalPeel> peels;  // decreasing levels
  DiffForm polar;
  DiffForm residue;  // degree n - 1, over the residue field
  FormWitness witness;
  // In local coordinates (place moved to x_var = 0): w - polar, then the
  // level-zero dlog term added back. Integral at x_var = 0.
  DiffForm local_tame;
};

LocalAnalysis analyze_place(const DiffForm& w, const DivisorValuation& v);
// u^-i phi + u^-i dlog(u) ^ phi' in global coordinates.
DiffForm peel_form(const LocalPeel& peel, const DivisorValuation& v);

struct WildEvidence {
  DivisorValuation place;
  int level;
  DiffForm phi;
  DiffForm phi_dt;
};

struct ResidueEvidence {
  DivisorValuation place;
  DiffForm residue;
};

struct ConstantEvidence {
  int var;
  DiffForm constant;
  FormWitness witness;  // w - constant
};

Verdict form_is_zero(const DiffForm& w);
bool form_verify(const DiffForm& w, const Verdict& v);

// Independent expansion used by the verifier: levels -> (phi, phi') from
// leading-term peeling with rf_valuation / rf_reduce in global coordinates.
std::map<int, std::pair<DiffForm, DiffForm>> expand_by_peeling(const DiffForm& w, const DivisorValuation& v);

}  // namespace charp::detail
