#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "charp/forms.hpp"
#include "charp/ratfunc.hpp"
#include "charp/valuation.hpp"
#include "charp/verdict.hpp"

namespace charp {

struct EntriesLess {
  bool operator()(const std::vector<RatFunc>& a, const std::vector<RatFunc>& b) const;
};

// Formal sum of symbols {b_1, ..., b_n} with coefficients in Z/m.
class KSymbolSum {
 public:
  using Terms = std::map<std::vector<RatFunc>, uint64_t, EntriesLess>;

  KSymbolSum() = default;
  KSymbolSum(Context ctx, int degree, uint64_t modulus);
  // c * {b_1, ..., b_n}
  static KSymbolSum symbol(const Context& ctx, uint64_t modulus, std::vector<RatFunc> entries,
                           int64_t coeff = 1);

  const Context& ctx() const { return ctx_; }
  int degree() const { return degree_; }
  uint64_t modulus() const { return m_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  // Throws ZeroArgument for a zero entry and LengthMismatch for a wrong degree.
  void add(std::vector<RatFunc> entries, int64_t coeff);
  void add_reduced(std::vector<RatFunc> entries, uint64_t coeff);

  KSymbolSum operator+(const KSymbolSum& o) const;
  KSymbolSum operator-(const KSymbolSum& o) const;
  KSymbolSum operator-() const;
  KSymbolSum scale(int64_t k) const;
  bool operator==(const KSymbolSum& o) const;
  bool operator!=(const KSymbolSum& o) const { return !(*this == o); }

  std::string to_string() const;

 private:
  void check_compatible(const KSymbolSum& o) const;
  Context ctx_;
  int degree_ = 0;
  uint64_t m_ = 2;
  Terms terms_;
};

// Product of symbols: {a} . {b} = {a, b}.
KSymbolSum k_cup(const KSymbolSum& a, const KSymbolSum& b);
// Coefficients reduced to a divisor of the modulus.
KSymbolSum k_change_modulus(const KSymbolSum& s, uint64_t modulus);

KSymbolSum k_normalize(const KSymbolSum& s);
// Tame symbol: {pi, u_2, ..., u_n} -> {u_2bar, ..., u_nbar}; units go to 0.
KSymbolSum k_residue(const KSymbolSum& s, const DivisorValuation& v);
// Throws RamifiedInput unless the residue vanishes.
KSymbolSum k_specialize(const KSymbolSum& s, const DivisorValuation& v);
// Throws ModulusNotP unless the modulus is the characteristic.
DiffForm k_dlog(const KSymbolSum& s);
Verdict k_is_zero(const KSymbolSum& s);

// Re-checks a verdict by recomputing the cited residues, forms and constants
// along a separate code path. Unknown verdicts never verify.
bool k_verify(const KSymbolSum& s, const Verdict& v);

}  // namespace charp
