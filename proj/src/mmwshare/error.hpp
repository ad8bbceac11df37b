#pragma once

#include <stdexcept>
#include <string>

namespace mmwshare {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch,
  kMissingEntry,
  kBudgetExceeded,
  kParse,
  kIo,
};

/// Single exception type thrown by the core; the C API maps `code()` onto
/// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace mmwshare
