#include "blockqn/errors.hpp"

namespace blockqn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateFactor: return "DegenerateFactor";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NotDescent: return "NotDescent";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::CurvatureViolation: return "CurvatureViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ReferenceFailed: return "ReferenceFailed";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace blockqn
