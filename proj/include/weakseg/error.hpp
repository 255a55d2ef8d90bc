#pragma once

#include <stdexcept>
#include <string>

namespace weakseg {

enum class ErrorKind {
  Shape,      // mismatched or invalid dimensions
  Padding,    // mirror padding margin not supported
  Format,     // malformed file contents
  Data,       // values violate a data invariant (NaN, out of range, empty)
  Parameter,  // invalid algorithm parameter
  Config,     // inconsistent configuration or grid
  Backend,    // classifier backend failure
  Dataset,    // dataset layout problems
  Usage,      // API misuse such as empty inputs
  Io,         // filesystem failure
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Padding: return "unsupported padding";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Backend: return "backend error";
    case ErrorKind::Dataset: return "dataset error";
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace weakseg
