#include "acbeta/error.hpp"

namespace acbeta {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kDemuxerFailed: return "DemuxerFailed";
    case ErrorCode::kWrongPointCount: return "WrongPointCount";
    case ErrorCode::kDegenerateRegion: return "DegenerateRegion";
    case ErrorCode::kTooFewBlocks: return "TooFewBlocks";
    case ErrorCode::kNoPatches: return "NoPatches";
    case ErrorCode::kTooFewVideos: return "TooFewVideos";
    case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingleClassTest: return "SingleClassTest";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace acbeta
