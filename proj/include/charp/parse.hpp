#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "charp/forms.hpp"
#include "charp/hsym.hpp"
#include "charp/milnor.hpp"
#include "charp/ratfunc.hpp"
#include "charp/valuation.hpp"
#include "charp/witt.hpp"

namespace charp {

using Bindings = std::map<std::string, RatFunc, std::less<>>;

// Rational function expression: + - * / ^ with integer exponents, parentheses,
// integer literals, declared variables and bound names.
RatFunc parse_ratfunc(const Context& ctx, std::string_view text, const Bindings& bindings = {});

// The structured grammar is listed in README.md. All parsers accept the
// output of the matching to_string() and throw Parse errors with a position.

// "[a_1, ..., a_r]"
WittVector parse_witt(const Context& ctx, std::string_view text, const Bindings& bindings = {});
// "f * d(x) ^ dlog(g) + ...", or a bare function for a 0-form.
DiffForm parse_form(const Context& ctx, std::string_view text, const Bindings& bindings = {});
// "c*{b_1, ..., b_n} + ... [@m]"; `modulus` applies when no @m is given.
KSymbolSum parse_ksym(const Context& ctx, std::string_view text, uint64_t modulus, const Bindings& bindings = {});
// "c*[a_1, ..., a_r | b_1, ..., b_n} + ..." or "[a_1, ..., a_r]" for degree 0.
// `length` is used only for the empty sum "0".
HSymbolSum parse_hsym(const Context& ctx, std::string_view text, int length, const Bindings& bindings = {});
// "x=c", "x=(f)", "inf(x)" or "poly(f, x)".
DivisorValuation parse_valuation(const Context& ctx, std::string_view text, const Bindings& bindings = {});
// "NAME = expr"; the name must not be a declared variable.
std::pair<std::string, RatFunc> parse_binding(const Context& ctx, std::string_view text,
                                              const Bindings& bindings = {});

}  // namespace charp
