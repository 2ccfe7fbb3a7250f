#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "charp/ratfunc.hpp"

namespace charp {

// Discrete valuation of F_p(x_1..x_m) at the divisor {x_var = center} or at
// infinity in x_var. The center may be a function of the other variables
// (a degree-one place over the subfield); public constructors take constants.
// Residue fields reuse the same context: their elements do not involve x_var.
class DivisorValuation {
 public:
  static DivisorValuation at(const Context& ctx, int var, int64_t c);
  static DivisorValuation at(const Context& ctx, std::string_view var, int64_t c);
  static DivisorValuation at_infinity(const Context& ctx, int var);
  static DivisorValuation at_infinity(const Context& ctx, std::string_view var);
  static DivisorValuation at_function(int var, const RatFunc& center);

  const Context& ctx() const { return center_.ctx(); }
  int var() const { return var_; }
  bool is_infinite() const { return infinite_; }
  const RatFunc& center() const { return center_; }
  bool has_constant_center() const { return infinite_ || center_.is_constant(); }

  // Canonical uniformizer: x - c, or 1/x at infinity.
  RatFunc uniformizer() const;
  // Moves the place to x_var = 0 (x -> x + c, or x -> 1/x).
  RatFunc to_local(const RatFunc& f) const;
  RatFunc from_local(const RatFunc& f) const;

  std::string to_string() const;
  bool operator==(const DivisorValuation& o) const;

 private:
  int var_ = 0;
  bool infinite_ = false;
  RatFunc center_;
};

int rf_valuation(const RatFunc& f, const DivisorValuation& v);
RatFunc rf_reduce(const RatFunc& f, const DivisorValuation& v);

// Order of vanishing at x_var = 0.
int local_valuation(const RatFunc& f, int var);
// Laurent coefficients of f at x_var = 0 for exponents lo..hi inclusive.
std::vector<RatFunc> laurent_coefficients(const RatFunc& f, int var, int lo, int hi);

// f = sum_e g_e^p x^e over reduced exponents e in [0, p)^m.
std::map<Exponents, RatFunc> rf_frobenius_decompose(const RatFunc& f);
RatFunc rf_frobenius_recompose(const Context& ctx, const std::map<Exponents, RatFunc>& parts);
std::optional<RatFunc> rf_pth_root(const RatFunc& f);

// g with g^p - g = f, if one exists in F_p(x_1..x_m).
// Throws ResourceLimit when the search space exceeds max_unknowns.
std::optional<RatFunc> solve_artin_schreier(const RatFunc& f, size_t max_unknowns = 4000);

}  // namespace charp
