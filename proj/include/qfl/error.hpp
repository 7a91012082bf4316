#pragma once

#include <stdexcept>
#include <string>

namespace qfl {

enum class ErrorCode {
  kInput = 1,
  kShape,
  kSize,
  kContract,
  kInvariance,
  kDegreeOverflow,
  kPromise,
  kUnsupportedGradient,
  kNonFinite,
  kConfig,
  kIo,
};

const char* error_code_name(ErrorCode code);

// All library failures surface as qfl::Error; the C API maps `code()` onto
// its status enum one-to-one.
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

}  // namespace qfl
