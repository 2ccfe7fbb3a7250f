#include "charp/verdict.hpp"

namespace charp {

const char* status_name(Status s) {
  switch (s) {
    case Status::Zero: return "Zero";
    case Status::NonZero: return "NonZero";
    case Status::Unknown: return "Unknown";
  }
  return "?";
}

std::string Certificate::to_string(int indent) const {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  std::string s = pad + rule;
  if (!place.empty()) s += " at " + place;
  if (!witness.empty()) s += ": " + witness;
  s += "\n";
  for (const auto& c : children) s += c.to_string(indent + 1);
  return s;
}

}  // namespace charp
