#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wpg {

enum class ErrorCode {
  kInvalidGrammar,
  kCompleteState,
  kIllegalAction,
  kInvalidWast,
  kLexical,
  kUnknownChannel,
  kUnknownFunction,
  kArity,
  kDataFlow,
  kMalformedAction,
  kCatalogParse,
  kDanglingReference,
  kCapabilityViolation,
  kInvalidConfig,
  kExhaustedSearch,
  kMissingPhrase,
  kTemplate,
  kMalformedRecord,
  kDuplicateId,
  kConsistency,
  kRatio,
  kEmptyUtterance,
  kNormalization,
  kNoCompleteHypothesis,
  kNonFiniteLoss,
  kEmptyDataset,
  kUnreviewed,
  kModelFormat,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries a machine-readable code; the
// message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wpg
