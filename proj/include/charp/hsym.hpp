#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "charp/forms.hpp"
#include "charp/milnor.hpp"
#include "charp/valuation.hpp"
#include "charp/verdict.hpp"
#include "charp/witt.hpp"

namespace charp {

inline constexpr size_t kMaxSymbolTerms = 10000;

// Formal sum of symbols [a_1..a_r | b_1..b_n} in H^{n+1}_{p^r}. Integer
// coefficients are folded into the Witt part; terms with the same entry tuple
// are merged with witt_add.
class HSymbolSum {
 public:
  using Terms = std::map<std::vector<RatFunc>, WittVector, EntriesLess>;

  HSymbolSum() = default;
  HSymbolSum(Context ctx, int degree, int length);
  static HSymbolSum symbol(const WittVector& w, std::vector<RatFunc> entries, int64_t coeff = 1);
  // [a | b_1..b_n} with r = 1
  static HSymbolSum symbol(const RatFunc& a, std::vector<RatFunc> entries, int64_t coeff = 1);

  const Context& ctx() const { return ctx_; }
  int degree() const { return n_; }
  int length() const { return r_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  // Throws ZeroArgument, LengthMismatch, ResourceLimit.
  void add(const WittVector& w, std::vector<RatFunc> entries, int64_t coeff = 1);

  HSymbolSum operator+(const HSymbolSum& o) const;
  HSymbolSum operator-(const HSymbolSum& o) const;
  HSymbolSum operator-() const;
  HSymbolSum scale(int64_t k) const;
  bool operator==(const HSymbolSum& o) const;
  bool operator!=(const HSymbolSum& o) const { return !(*this == o); }

  std::string to_string() const;

 private:
  void check_compatible(const HSymbolSum& o) const;
  Context ctx_;
  int n_ = 0;
  int r_ = 1;
  Terms terms_;
};

HSymbolSum h_normalize(const HSymbolSum& s);
// Keeps the first r - k Witt slots; 1 <= k < r.
HSymbolSum h_truncate_pi(const HSymbolSum& s, int k);
// Places the Witt parts in the last slots of length r.
HSymbolSum h_shift_iota(const HSymbolSum& s, int r);
HSymbolSum h_multiply_p(const HSymbolSum& s);
// [w | b} . {c} = [w | b, c}
HSymbolSum h_cup(const HSymbolSum& s, const KSymbolSum& k);
// r = 1 only: sum a dlog b_1 ^ ... ^ dlog b_n.
DiffForm h_to_form(const HSymbolSum& s);
// Inverse of h_to_form on the basis: f dx_I -> [f x_I | x_I}.
HSymbolSum h_from_form(const DiffForm& w);

// Smallest s <= r with p^s x = 0, or nullopt when a test is undecided.
std::optional<int> h_torsion_order_bound(const HSymbolSum& s);

// Place of the linear polynomial f in var (a degree-one place over the other
// variables). Throws UnsupportedResidueField for higher degree.
DivisorValuation place_of_polynomial(const RatFunc& f, int var);

// Ramification verdicts describe the image in the wild quotient: Zero means
// tame, NonZero wild.
Verdict h_is_tame(const HSymbolSum& s, const DivisorValuation& v);
// nullopt when undecided.
std::optional<bool> h_is_wild(const HSymbolSum& s, const DivisorValuation& v);

// Throws WildInput on wild classes and Unsupported when tameness is undecided.
HSymbolSum h_residue(const HSymbolSum& s, const DivisorValuation& v);
// Residue-field data seen in F; the identity on representatives.
HSymbolSum h_constant_lift(const HSymbolSum& c, const DivisorValuation& v);
// Reduction of a representative with integral Witt parts and unit entries.
// Throws RamifiedInput otherwise.
HSymbolSum h_reduce(const HSymbolSum& s, const DivisorValuation& v);

struct FiltrationReport {
  DivisorValuation place;
  int level = 0;
  // Over the residue field: phi when p does not divide the level, else the
  // pair (phi mod closed forms, phi' mod closed forms).
  DiffForm graded;
  DiffForm graded_dt;
  bool wild = false;
  // Length of the Witt part at which the class was found (1 unless the
  // input had higher length).
  int witt_length = 1;

  std::string to_string() const;
};

FiltrationReport h_filtration(const HSymbolSum& s, const DivisorValuation& v);

struct SimpleFormTerm {
  int level;
  DiffForm phi;     // degree n
  DiffForm phi_dt;  // degree n - 1, zero unless p divides the level
};

struct SimpleFormDecomposition {
  DivisorValuation place;
  std::vector<SimpleFormTerm> terms;
  HSymbolSum tame;

  // sum pi^{-i} phi_i + pi^{-i} dlog(pi) ^ phi'_i as symbols.
  HSymbolSum recomposed() const;
};

SimpleFormDecomposition h_simple_form(const HSymbolSum& s, const DivisorValuation& v);

// Zero means unramified: tame with vanishing residue.
Verdict h_is_unramified(const HSymbolSum& s, const DivisorValuation& v);

Verdict h_is_zero(const HSymbolSum& s);

// Re-checks a verdict of h_is_zero along separate code paths: Zero verdicts
// replay their relation chain, NonZero verdicts recompute the cited graded
// classes and residues. Unknown verdicts never verify.
bool h_verify(const HSymbolSum& s, const Verdict& v);

}  // namespace charp
