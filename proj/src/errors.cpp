#include "charp/errors.hpp"

namespace charp {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::UndeclaredVariable: return "UndeclaredVariable";
    case ErrorKind::InvalidContext: return "InvalidContext";
    case ErrorKind::ContextMismatch: return "ContextMismatch";
    case ErrorKind::ZeroInput: return "ZeroInput";
    case ErrorKind::NegativeValuation: return "NegativeValuation";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ZeroArgument: return "ZeroArgument";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::InternalLimit: return "InternalLimit";
    case ErrorKind::RamifiedInput: return "RamifiedInput";
    case ErrorKind::ModulusNotP: return "ModulusNotP";
    case ErrorKind::ModulusMismatch: return "ModulusMismatch";
    case ErrorKind::WildInput: return "WildInput";
    case ErrorKind::UnsupportedResidueField: return "UnsupportedResidueField";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::ZeroDiscriminant: return "ZeroDiscriminant";
    case ErrorKind::A1Zero: return "A1Zero";
    case ErrorKind::WrongCharacteristic: return "WrongCharacteristic";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::Parse: return "ParseError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

}  // namespace charp
