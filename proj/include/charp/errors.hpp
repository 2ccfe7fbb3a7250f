#pragma once

#include <stdexcept>
#include <string>

namespace charp {

enum class ErrorKind {
  DivisionByZero,
  UndeclaredVariable,
  InvalidContext,
  ContextMismatch,
  ZeroInput,
  NegativeValuation,
  LengthMismatch,
  IndexOutOfRange,
  ZeroArgument,
  NotClosed,
  InternalLimit,
  RamifiedInput,
  ModulusNotP,
  ModulusMismatch,
  WildInput,
  UnsupportedResidueField,
  Unsupported,
  ZeroDiscriminant,
  A1Zero,
  WrongCharacteristic,
  ResourceLimit,
  Parse,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace charp
