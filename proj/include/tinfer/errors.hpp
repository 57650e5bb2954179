#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tinfer {

// Category strings are part of the CLI contract: one-line diagnostics are
// prefixed with exactly one of these.
enum class ErrorCategory { parse, shape, capacity, inconsistent_evidence };

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::shape: return "shape";
    case ErrorCategory::capacity: return "capacity";
    case ErrorCategory::inconsistent_evidence: return "inconsistent-evidence";
  }
  return "error";
}

class InferenceError : public std::runtime_error {
 public:
  InferenceError(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), cat_(cat) {}
  ErrorCategory category() const { return cat_; }

 private:
  ErrorCategory cat_;
};

// Malformed input text. token_index is the 0-based index of the offending
// whitespace-separated token (or of the end of the stream when truncated).
class ParseError : public InferenceError {
 public:
  ParseError(const std::string& msg, std::size_t token_index)
      : InferenceError(ErrorCategory::parse,
                       msg + " (token " + std::to_string(token_index) + ")"),
        token_index_(token_index) {}
  std::size_t token_index() const { return token_index_; }

 private:
  std::size_t token_index_;
};

class ShapeError : public InferenceError {
 public:
  explicit ShapeError(const std::string& msg)
      : InferenceError(ErrorCategory::shape, msg) {}
};

class CapacityError : public InferenceError {
 public:
  explicit CapacityError(const std::string& msg)
      : InferenceError(ErrorCategory::capacity, msg) {}
};

// Evidence with zero probability under the model.
class EvidenceError : public InferenceError {
 public:
  explicit EvidenceError(const std::string& msg)
      : InferenceError(ErrorCategory::inconsistent_evidence, msg) {}
};

}  // namespace tinfer
