#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracslip {

enum class ErrorCode {
  InvalidArgument,
  ShapeTouchesBoundary,
  DisconnectedFluid,
  UnderResolvedFracture,
  GridMismatch,
  SingularSystem,
  NonConvergence,
  PicardDiverged,
  MaxIterExceeded,
  UnknownRegion,
  MissingSecondLayer,
  TruncationSuspect,
  InsufficientDecayWindow,
  InsufficientPoints,
  CollinearSamples,
  HypothesisViolated,
  ConfigError,
  MissingArtifacts,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fracslip
