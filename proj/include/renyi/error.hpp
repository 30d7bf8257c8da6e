#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace renyi {

enum class ErrorKind {
  // data errors
  MissingLabelColumn,
  MissingColumn,
  UnknownCategory,
  NonBinaryLabel,
  EmptyDataset,
  RaggedRow,
  IndexOutOfAlphabet,
  DuplicatePair,
  SelfPair,
  InvalidDistribution,
  InstanceTooLarge,
  LengthMismatch,
  DimensionMismatch,
  DegeneratePrior,
  FormatVersionMismatch,
  CorruptModel,
  Io,
  // argument errors
  NonPositiveLambda,
  InvalidArgument,
  // numerical outcomes
  SingularSystem,
  MaxIterationsExceeded,
  Infeasible,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// that callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace renyi
