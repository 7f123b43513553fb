#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ucca {

enum class ErrorCode {
  // Passage construction.
  DuplicateId,
  DanglingEdge,
  PrimaryCycle,
  MultiplePrimaryParents,
  TokenCoverageGap,
  InvalidToken,
  InvalidUnit,
  InvalidEdge,
  MissingRoot,
  InvalidRemote,
  RemoteCycle,
  UnknownUnit,
  NotInternal,
  // Bracket notation.
  UnbalancedBrackets,
  UnknownCategoryLabel,
  MissingLabel,
  EmptyUnit,
  DanglingContinuation,
  OrphanContinuation,
  AmbiguousContinuation,
  UnresolvedRemote,
  AmbiguousRemote,
  MisplacedRemote,
  NestedRemote,
  // Interchange documents.
  MalformedDocument,
  UnsupportedVersion,
  // Scoring.
  TokenMismatch,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the bracket-notation parser. `position` is a byte offset into the
// parsed source and never exceeds its length.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t position, std::string expected, std::string found);

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t position_;
  std::string expected_;
  std::string found_;
};

}  // namespace ucca
