#include "phishkd/error.hpp"

namespace phishkd {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PathNotFound: return "PathNotFound";
    case ErrorCode::UnreadableEntry: return "UnreadableEntry";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::MalformedUrl: return "MalformedUrl";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::CorruptLexicon: return "CorruptLexicon";
    case ErrorCode::CorruptDataset: return "CorruptDataset";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace phishkd
