#include "modelspace/error.hpp"

#include <utility>

namespace modelspace {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kUnknownPredicate: return "UnknownPredicate";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kUnknownObject: return "UnknownObject";
    case ErrorCode::kUnknownVariable: return "UnknownVariable";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kGroundingBlowup: return "GroundingBlowup";
    case ErrorCode::kUnknownAction: return "UnknownAction";
    case ErrorCode::kEmptySpace: return "EmptySpace";
    case ErrorCode::kConflictingEdit: return "ConflictingEdit";
    case ErrorCode::kStaleEdit: return "StaleEdit";
    case ErrorCode::kNameCollision: return "NameCollision";
    case ErrorCode::kTooManyEdits: return "TooManyEdits";
    case ErrorCode::kMissingExtras: return "MissingExtras";
    case ErrorCode::kContextOverflow: return "ContextOverflow";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kUnparseableResponse: return "UnparseableResponse";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNoNumberFound: return "NoNumberFound";
    case ErrorCode::kGenerationFailed: return "GenerationFailed";
    case ErrorCode::kPerturbationFailed: return "PerturbationFailed";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kUnknownInstance: return "UnknownInstance";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

ParseError::ParseError(ErrorCode code, const std::string& message, int line,
                       int column, std::string token)
    : Error(code, message + " at " + std::to_string(line) + ":" +
                      std::to_string(column) +
                      (token.empty() ? std::string() : " near '" + token + "'")),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

UnparseableResponse::UnparseableResponse(const std::string& message,
                                         std::vector<std::string> diagnostics)
    : Error(ErrorCode::kUnparseableResponse, message),
      diagnostics_(std::move(diagnostics)) {}

ProviderError::ProviderError(int status, std::string body)
    : Error(ErrorCode::kProviderError,
            "provider returned status " + std::to_string(status)),
      status_(status),
      body_(std::move(body)) {}

}  // namespace modelspace
