#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace acbeta {

enum class ErrorCode {
  kParseError,
  kSchemaMismatch,
  kDecodeError,
  kDemuxerFailed,
  kWrongPointCount,
  kDegenerateRegion,
  kTooFewBlocks,
  kNoPatches,
  kTooFewVideos,
  kSingleClassTraining,
  kDimensionMismatch,
  kSingleClassTest,
  kIoError,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports is an Error carrying one of the codes
// above; callers that skip work on a given condition switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace acbeta
