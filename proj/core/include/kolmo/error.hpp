#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kolmo {

enum class Errc {
  kOutOfRange,
  kInadmissible,
  kDegenerate,
  kStepUnderflow,
  kSegmentThroughOrigin,
  kParityMismatch,
  kCensoredDraw,
  kInvalidDraw,
  kEmptyPool,
  kInsufficientData,
  kOutsideStrip,
  kQuadratureFailure,
  kOscillationOverflow,
  kAllCensored,
  kWindowTooSparse,
  kNonfiniteVariance,
  kConfigError,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(Errc code);

// Single exception type for the library; the code carries the error kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace kolmo
