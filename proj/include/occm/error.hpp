#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occm {

enum class ErrorCode {
  InvalidArgument,
  MassOverflow,
  GridTooSmall,
  DimensionMismatch,
  SingularKernel,
  OverlapError,
  EmptyAdmissibleSet,
  DimensionError,
  NoConvergence,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// the CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace occm
