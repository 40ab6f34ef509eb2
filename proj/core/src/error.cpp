#include "wpg/error.hpp"

namespace wpg {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidGrammar: return "invalid_grammar";
    case ErrorCode::kCompleteState: return "complete_state";
    case ErrorCode::kIllegalAction: return "illegal_action";
    case ErrorCode::kInvalidWast: return "invalid_wast";
    case ErrorCode::kLexical: return "lexical";
    case ErrorCode::kUnknownChannel: return "unknown_channel";
    case ErrorCode::kUnknownFunction: return "unknown_function";
    case ErrorCode::kArity: return "arity";
    case ErrorCode::kDataFlow: return "data_flow";
    case ErrorCode::kMalformedAction: return "malformed_action";
    case ErrorCode::kCatalogParse: return "catalog_parse";
    case ErrorCode::kDanglingReference: return "dangling_reference";
    case ErrorCode::kCapabilityViolation: return "capability_violation";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kExhaustedSearch: return "exhausted_search";
    case ErrorCode::kMissingPhrase: return "missing_phrase";
    case ErrorCode::kTemplate: return "template";
    case ErrorCode::kMalformedRecord: return "malformed_record";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kConsistency: return "consistency";
    case ErrorCode::kRatio: return "ratio";
    case ErrorCode::kEmptyUtterance: return "empty_utterance";
    case ErrorCode::kNormalization: return "normalization";
    case ErrorCode::kNoCompleteHypothesis: return "no_complete_hypothesis";
    case ErrorCode::kNonFiniteLoss: return "non_finite_loss";
    case ErrorCode::kEmptyDataset: return "empty_dataset";
    case ErrorCode::kUnreviewed: return "unreviewed";
    case ErrorCode::kModelFormat: return "model_format";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace wpg
