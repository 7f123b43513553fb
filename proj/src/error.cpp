#include "ucca/error.hpp"

#include <utility>

namespace ucca {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::PrimaryCycle: return "PrimaryCycle";
    case ErrorCode::MultiplePrimaryParents: return "MultiplePrimaryParents";
    case ErrorCode::TokenCoverageGap: return "TokenCoverageGap";
    case ErrorCode::InvalidToken: return "InvalidToken";
    case ErrorCode::InvalidUnit: return "InvalidUnit";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::MissingRoot: return "MissingRoot";
    case ErrorCode::InvalidRemote: return "InvalidRemote";
    case ErrorCode::RemoteCycle: return "RemoteCycle";
    case ErrorCode::UnknownUnit: return "UnknownUnit";
    case ErrorCode::NotInternal: return "NotInternal";
    case ErrorCode::UnbalancedBrackets: return "UnbalancedBrackets";
    case ErrorCode::UnknownCategoryLabel: return "UnknownCategoryLabel";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::EmptyUnit: return "EmptyUnit";
    case ErrorCode::DanglingContinuation: return "DanglingContinuation";
    case ErrorCode::OrphanContinuation: return "OrphanContinuation";
    case ErrorCode::AmbiguousContinuation: return "AmbiguousContinuation";
    case ErrorCode::UnresolvedRemote: return "UnresolvedRemote";
    case ErrorCode::AmbiguousRemote: return "AmbiguousRemote";
    case ErrorCode::MisplacedRemote: return "MisplacedRemote";
    case ErrorCode::NestedRemote: return "NestedRemote";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TokenMismatch: return "TokenMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string describe_parse_error(std::size_t position, const std::string& expected,
                                 const std::string& found) {
  std::string out = "at byte " + std::to_string(position) + ": expected " + expected;
  if (!found.empty()) out += ", found " + found;
  return out;
}

}  // namespace

ParseError::ParseError(ErrorCode code, std::size_t position, std::string expected, std::string found)
    : Error(code, describe_parse_error(position, expected, found)),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

}  // namespace ucca
