#pragma once

#include <optional>

#include "charp/poly.hpp"

namespace charp::detail {

// Monic gcd by evaluation and interpolation; nullopt if the evaluation
// points run out.
std::optional<Poly> modular_gcd(const Poly& a, const Poly& b);
// Subresultant-free primitive PRS, kept as a reference for tests.
Poly prs_gcd_reference(const Poly& a, const Poly& b);

}  // namespace charp::detail
