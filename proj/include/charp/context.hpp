#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace charp {

inline constexpr int kMaxVars = 16;

// A rational function field F_p(x_1, ..., x_m). The variable order fixes the
// monomial order (lex, x_1 largest); the last variable is the distinguished one.
class FieldContext {
 public:
  static std::shared_ptr<const FieldContext> create(uint32_t p, std::vector<std::string> vars);

  uint32_t p() const { return p_; }
  int num_vars() const { return static_cast<int>(vars_.size()); }
  const std::vector<std::string>& vars() const { return vars_; }
  const std::string& name(int i) const { return vars_.at(i); }
  // -1 when absent
  int index_of(std::string_view name) const;
  int index_or_throw(std::string_view name) const;

 private:
  FieldContext(uint32_t p, std::vector<std::string> vars) : p_(p), vars_(std::move(vars)) {}
  uint32_t p_;
  std::vector<std::string> vars_;
};

using Context = std::shared_ptr<const FieldContext>;

bool valid_identifier(std::string_view s);

}  // namespace charp
