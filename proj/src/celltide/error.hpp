#pragma once

#include <stdexcept>
#include <string>

namespace celltide {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  Numeric,
  Fit,
};

/// Every failure raised by the core carries one of these codes; the C API
/// maps them onto ct_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace celltide
