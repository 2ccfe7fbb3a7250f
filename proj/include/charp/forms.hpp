#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "charp/ratfunc.hpp"

namespace charp {

// Differential n-form over F_p(x_1..x_m) in the basis dx_I; I is a bit mask.
class DiffForm {
 public:
  DiffForm() = default;
  DiffForm(Context ctx, int degree) : ctx_(std::move(ctx)), degree_(degree) {}
  static DiffForm function(const RatFunc& f);
  static DiffForm basis(const RatFunc& coeff, uint32_t mask);
  // dx_var
  static DiffForm dx(const Context& ctx, int var);

  const Context& ctx() const { return ctx_; }
  int degree() const { return degree_; }
  const std::map<uint32_t, RatFunc>& terms() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  RatFunc coeff(uint32_t mask) const;
  uint32_t var_mask() const;

  DiffForm operator+(const DiffForm& o) const;
  DiffForm operator-(const DiffForm& o) const;
  DiffForm operator-() const;
  DiffForm& operator+=(const DiffForm& o) { return *this = *this + o; }
  DiffForm& operator-=(const DiffForm& o) { return *this = *this - o; }
  DiffForm operator*(const RatFunc& f) const;

  bool operator==(const DiffForm& o) const { return degree_ == o.degree_ && c_ == o.c_; }
  bool operator!=(const DiffForm& o) const { return !(*this == o); }
  int compare(const DiffForm& o) const;

  std::string to_string() const;

 private:
  void add_term(uint32_t mask, const RatFunc& f);
  Context ctx_;
  int degree_ = 0;
  std::map<uint32_t, RatFunc> c_;
};

inline DiffForm operator*(const RatFunc& f, const DiffForm& w) { return w * f; }

DiffForm wedge(const DiffForm& a, const DiffForm& b);
DiffForm form_d(const DiffForm& w);
DiffForm form_d(const RatFunc& f);
// a * db_1/b_1 ^ ... ^ db_n/b_n; throws ZeroArgument if some b_i = 0.
DiffForm form_dlog(const RatFunc& a, const std::vector<RatFunc>& b);
DiffForm inverse_cartier(const DiffForm& w);
// Throws NotClosed unless dw = 0.
DiffForm cartier(const DiffForm& w);
// Cartier formula applied without the closedness check; agrees with cartier()
// on closed forms and kills exact forms.
DiffForm cartier_formula(const DiffForm& w);
bool is_closed(const DiffForm& w);
bool is_logarithmic(const DiffForm& w);

// Contracting homotopy h of the de Rham complex over the p-th powers:
// w = d(h w) + h(d w) + inverse_cartier(cartier_formula(w)) for every w.
// For exact w this gives an explicit antiderivative.
DiffForm form_homotopy(const DiffForm& w);

// Pullback along x_var -> value.
DiffForm form_substitute(const DiffForm& w, int var, const RatFunc& value);

struct LogTerm {
  RatFunc a;
  std::vector<RatFunc> b;  // the logarithmic form dlog b_1 ^ ... ^ dlog b_n
};

struct ClosedFormClassification {
  enum class Verdict { NotClosed, Exact, LogDecomposition } verdict = Verdict::NotClosed;
  // w = sum a_j^p dlog b_j + d(antiderivative) for LogDecomposition and Exact.
  std::vector<LogTerm> log_parts;
  DiffForm antiderivative;
  // Number of Cartier steps after which the input minus the log parts dies.
  int iterations = 0;
  // Iterating C from w: the first form reached that C fixes (possibly 0),
  // when the iteration stays inside closed forms.
  std::optional<DiffForm> stable_part;
  int stable_after = 0;
};

// Throws InternalLimit if the Cartier iteration has not settled after 64 steps.
ClosedFormClassification classify_closed(const DiffForm& w);

DiffForm log_terms_form(const Context& ctx, int degree, const std::vector<LogTerm>& parts);

}  // namespace charp
