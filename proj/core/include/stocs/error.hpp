#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stocs {

enum class ErrorCode {
  // parsing
  SyntaxError,
  ChainedComparison,
  TypeError,
  // instance validation
  DuplicateName,
  EmptyName,
  EmptyDomain,
  UnsortedDomain,
  NonIntegerDomain,
  BadProbabilitySum,
  NegativeProbability,
  ProbabilitiesOnDecision,
  MissingProbabilities,
  UnknownScopeVariable,
  DuplicateScopeVariable,
  ArityMismatch,
  OutOfDomainValue,
  ThetaOutOfRange,
  BadConditionalTable,
  // evaluation
  MissingAssignment,
  PartialAssignment,
  MissingParentValue,
  ConditionalTablesPresent,
  MalformedPolicy,
  OracleCapExceeded,
  NonpositiveBranchProbability,
  // approximation / extensions
  BadEpsilon,
  BadK,
  BadSampleCount,
  NoHeuristicPolicy,
  NoObjective,
  // tooling
  IoError,
  MismatchBetweenAlgorithms,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `value()` carries the offending
/// number where one exists (the actual probability sum, the policy count).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<double> value = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<double> value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  std::optional<double> value_;
};

}  // namespace stocs
