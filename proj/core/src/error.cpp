#include "stocs/error.hpp"

namespace stocs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ChainedComparison: return "ChainedComparison";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::EmptyName: return "EmptyName";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::UnsortedDomain: return "UnsortedDomain";
    case ErrorCode::NonIntegerDomain: return "NonIntegerDomain";
    case ErrorCode::BadProbabilitySum: return "BadProbabilitySum";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::ProbabilitiesOnDecision: return "ProbabilitiesOnDecision";
    case ErrorCode::MissingProbabilities: return "MissingProbabilities";
    case ErrorCode::UnknownScopeVariable: return "UnknownScopeVariable";
    case ErrorCode::DuplicateScopeVariable: return "DuplicateScopeVariable";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::OutOfDomainValue: return "OutOfDomainValue";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::BadConditionalTable: return "BadConditionalTable";
    case ErrorCode::MissingAssignment: return "MissingAssignment";
    case ErrorCode::PartialAssignment: return "PartialAssignment";
    case ErrorCode::MissingParentValue: return "MissingParentValue";
    case ErrorCode::ConditionalTablesPresent: return "ConditionalTablesPresent";
    case ErrorCode::MalformedPolicy: return "MalformedPolicy";
    case ErrorCode::OracleCapExceeded: return "OracleCapExceeded";
    case ErrorCode::NonpositiveBranchProbability: return "NonpositiveBranchProbability";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::BadSampleCount: return "BadSampleCount";
    case ErrorCode::NoHeuristicPolicy: return "NoHeuristicPolicy";
    case ErrorCode::NoObjective: return "NoObjective";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MismatchBetweenAlgorithms: return "MismatchBetweenAlgorithms";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<double> value)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), value_(value) {}

}  // namespace stocs
