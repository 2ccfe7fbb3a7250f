#pragma once

#include <any>
#include <string>
#include <vector>

namespace charp {

enum class Status { Zero, NonZero, Unknown };

const char* status_name(Status s);

// One step of a decision. `evidence` holds the typed data needed to re-check
// the step (a form, a valuation, a reduced sum); `witness` is its printout.
struct Certificate {
  std::string rule;
  std::string place;
  std::string witness;
  std::any evidence;
  std::vector<Certificate> children;

  std::string to_string(int indent = 0) const;
};

struct Verdict {
  Status status = Status::Unknown;
  Certificate certificate;

  static Verdict zero(Certificate c) { return {Status::Zero, std::move(c)}; }
  static Verdict nonzero(Certificate c) { return {Status::NonZero, std::move(c)}; }
  static Verdict unknown(Certificate c) { return {Status::Unknown, std::move(c)}; }
};

}  // namespace charp
