#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blockqn {

enum class ErrorCode {
  DegenerateFactor,
  NotPositiveDefinite,
  NonFiniteValue,
  NotDescent,
  SingularBlock,
  CurvatureViolation,
  DimensionMismatch,
  Infeasible,
  RankDeficient,
  UnknownFunction,
  BadDimension,
  ParseError,
  EmptyDataset,
  ReferenceFailed,
  EmptyInput,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every module; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace blockqn
