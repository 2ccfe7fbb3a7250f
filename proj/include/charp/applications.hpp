#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "charp/hsym.hpp"
#include "charp/milnor.hpp"
#include "charp/ratfunc.hpp"
#include "charp/verdict.hpp"

namespace charp {

// Long Weierstrass coefficients a1, a2, a3, a4, a6 and the derived quantities,
// computed over Z and reduced mod p.
struct WeierstrassData {
  std::array<RatFunc, 5> a;
  RatFunc b2, b4, b6, b8, c4, c6, delta;

  // c4^3 / delta; throws ZeroDiscriminant.
  RatFunc j() const;
};

// Throws InternalLimit if 4 b8 = b2 b6 - b4^2 or 1728 delta = c4^3 - c6^2 fails.
WeierstrassData weierstrass_quantities(const std::array<RatFunc, 5>& a);
// The variables a1, a2, a3, a4, a6 of ctx.
std::array<RatFunc, 5> weierstrass_variables(const Context& ctx);

// Characteristic 2, a1 != 0: a2' = (a1 a2 + a3)/a1^3 and a6' = delta/a1^12.
// Throws WrongCharacteristic, A1Zero.
struct Char2Coordinates {
  RatFunc a2p;
  RatFunc a6p;
};
Char2Coordinates char2_coordinates(const std::array<RatFunc, 5>& a);

// [(0, ..., 0, (a1 a2 + a3)/a1^3)] in H^1 of length r. Throws WrongCharacteristic.
HSymbolSum alpha_class(const Context& ctx, int r);

// {x_1..x_n} mod 2 -> [(0, ..., 0, 1) | x_1..x_n}. Throws ModulusMismatch.
HSymbolSum mu_map(const KSymbolSum& s, int r);

// Pair (w, y) with 4 w = mu(y) as the membership condition.
struct JGroupElement {
  HSymbolSum w;
  KSymbolSum y;
};
// Zero: member.
Verdict j_group_check(const JGroupElement& e);

// Difference of the two pullbacks of gamma along t -> t and t -> t + s^p - s,
// tested for zero. Zero: gamma descends.
Verdict bzp_descent_check(const HSymbolSum& gamma, int t_var, int s_var);

struct CheckResult {
  std::string check_id;
  std::string anchor;  // the statement being checked
  std::string expected;
  std::string computed;
  bool pass = false;
};

// One decision taken while running a battery. Zero tests carry a certificate
// replayed by h_verify / k_verify; ramification decisions have no separate
// verifier and are logged for the Unknown audit only.
struct DecisionRecord {
  std::string check_id;
  std::string kind;  // "zero-test" or "ramification"
  std::string subject;
  Status status = Status::Unknown;
  bool verified = false;
};

struct VerificationReport {
  std::string battery;
  uint32_t characteristic = 0;
  int r = 0;             // Witt length, 0 when unused
  uint64_t modulus = 0;  // coefficient modulus of the K-theory checks
  std::string note;
  std::vector<CheckResult> checks;
  std::vector<DecisionRecord> decisions;

  bool all_passed() const;
  std::string to_string() const;
};

// battery: "char2", "char3", "charp" (p in {5, 7}), "mod-ell", "kcoeff", "bzp".
// For "charp" the prime is `prime` (default 5); for "mod-ell" it is the
// characteristic (2 or 3) and `ell` the coefficient modulus.
VerificationReport verify_battery(const std::string& battery, int r, uint64_t ell = 0, uint32_t prime = 0);

}  // namespace charp
