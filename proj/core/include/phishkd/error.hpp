#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phishkd {

enum class ErrorCode {
  PathNotFound,
  UnreadableEntry,
  MalformedMessage,
  MalformedUrl,
  EmptyCorpus,
  AllZero,
  LengthMismatch,
  SingleClass,
  EmptyDataset,
  ArityMismatch,
  IoError,
  VersionMismatch,
  CorruptModel,
  CorruptLexicon,
  CorruptDataset,
  TooFewRows,
  EmptyMatrix,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library is an Error carrying a code, so
// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phishkd
