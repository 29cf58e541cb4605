#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddelast {

enum class ErrorCode {
  kInvalidArgument,
  kConfig,
  kParse,
  kIo,
  kDimensionMismatch,
  kDiverged,
  kSingular,
  kNoConvergence,
  kIllPosed,
  kBudgetExceeded,
  kAllFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace ddelast
