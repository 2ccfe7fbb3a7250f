#include "charp/context.hpp"

#include <cctype>
#include <set>

#include "charp/errors.hpp"
#include "charp/fp.hpp"

namespace charp {

bool valid_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::shared_ptr<const FieldContext> FieldContext::create(uint32_t p, std::vector<std::string> vars) {
  if (!fp::is_prime(p) || p >= (1u << 31))
    throw Error(ErrorKind::InvalidContext, "p = " + std::to_string(p) + " is not a supported prime");
  if (static_cast<int>(vars.size()) > kMaxVars)
    throw Error(ErrorKind::InvalidContext, "at most " + std::to_string(kMaxVars) + " variables");
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (!valid_identifier(v)) throw Error(ErrorKind::InvalidContext, "bad variable name '" + v + "'");
    if (!seen.insert(v).second) throw Error(ErrorKind::InvalidContext, "duplicate variable '" + v + "'");
  }
  return std::shared_ptr<const FieldContext>(new FieldContext(p, std::move(vars)));
}

int FieldContext::index_of(std::string_view name) const {
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == name) return static_cast<int>(i);
  return -1;
}

int FieldContext::index_or_throw(std::string_view name) const {
  int i = index_of(name);
  if (i < 0) throw Error(ErrorKind::UndeclaredVariable, std::string(name));
  return i;
}

}  // namespace charp
