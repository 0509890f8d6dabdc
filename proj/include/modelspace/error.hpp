#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace modelspace {

enum class ErrorCode {
  kSyntaxError,
  kUnsupportedFeature,
  kArityMismatch,
  kUnknownPredicate,
  kUnknownType,
  kUnknownObject,
  kUnknownVariable,
  kTypeMismatch,
  kInvalidModel,
  kGroundingBlowup,
  kUnknownAction,
  kEmptySpace,
  kConflictingEdit,
  kStaleEdit,
  kNameCollision,
  kTooManyEdits,
  kMissingExtras,
  kContextOverflow,
  kProviderError,
  kTimeout,
  kUnparseableResponse,
  kOutOfRange,
  kNoNumberFound,
  kGenerationFailed,
  kPerturbationFailed,
  kInvariantViolation,
  kUnknownInstance,
  kSchemaError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every recoverable failure surfaced by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the PDDL reader; carries the 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, int line, int column,
             std::string token);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& token() const noexcept { return token_; }

 private:
  int line_;
  int column_;
  std::string token_;
};

/// Raised when an LLM reply yields nothing usable. The per-line diagnostics
/// explain why each candidate line was dropped.
class UnparseableResponse : public Error {
 public:
  UnparseableResponse(const std::string& message,
                      std::vector<std::string> diagnostics);

  const std::vector<std::string>& diagnostics() const noexcept {
    return diagnostics_;
  }

 private:
  std::vector<std::string> diagnostics_;
};

class ProviderError : public Error {
 public:
  ProviderError(int status, std::string body);

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

}  // namespace modelspace
