#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regnet {

// Stable error categories. The CLI maps each one to its own exit status.
enum class ErrorCode {
  InvalidInput = 2,
  Io,
  MissingCountry,
  UnknownRegion,
  NegativeCount,
  MergeCollision,
  TooFewCountries,
  ZeroOutput,
  ZeroRow,
  LengthMismatch,
  EmptyNetwork,
  TooManyNodes,
  NodeSetMismatch,
  Config,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace regnet
