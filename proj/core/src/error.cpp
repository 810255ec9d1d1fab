#include "kolmo/error.hpp"

namespace kolmo {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kOutOfRange: return "OutOfRange";
    case Errc::kInadmissible: return "Inadmissible";
    case Errc::kDegenerate: return "Degenerate";
    case Errc::kStepUnderflow: return "StepUnderflow";
    case Errc::kSegmentThroughOrigin: return "SegmentThroughOrigin";
    case Errc::kParityMismatch: return "ParityMismatch";
    case Errc::kCensoredDraw: return "CensoredDraw";
    case Errc::kInvalidDraw: return "InvalidDraw";
    case Errc::kEmptyPool: return "EmptyPool";
    case Errc::kInsufficientData: return "InsufficientData";
    case Errc::kOutsideStrip: return "OutsideStrip";
    case Errc::kQuadratureFailure: return "QuadratureFailure";
    case Errc::kOscillationOverflow: return "OscillationOverflow";
    case Errc::kAllCensored: return "AllCensored";
    case Errc::kWindowTooSparse: return "WindowTooSparse";
    case Errc::kNonfiniteVariance: return "NonfiniteVariance";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace kolmo
