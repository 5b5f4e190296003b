#pragma once

#include <stdexcept>
#include <string>

namespace mcb {

// Mirrors the status codes of the C API (mcb.h); keep the numeric values in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kOverTrimmed = 3,
  kFilterCollapse = 4,
  kNegativeDensity = 5,
  kEmptyGroup = 6,
  kParse = 7,
  kIo = 8,
  kUnknownKind = 9,
  kInternal = 100,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace mcb
