#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fcmcrlb {

enum class ErrorCode {
  InvalidArgument = 1,
  Domain,
  NotPsd,
  Precondition,
  DimensionMismatch,
  Config,
  Io,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

// Non-fatal diagnostics (e.g. Doppler outside the eigenvalue-fit range).
// The default handler writes to stderr.
using WarningHandler = std::function<void(std::string_view)>;

void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace fcmcrlb
