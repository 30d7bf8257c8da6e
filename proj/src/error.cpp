#include "renyi/error.hpp"

namespace renyi {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingLabelColumn: return "MissingLabelColumn";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::UnknownCategory: return "UnknownCategory";
    case ErrorKind::NonBinaryLabel: return "NonBinaryLabel";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::IndexOutOfAlphabet: return "IndexOutOfAlphabet";
    case ErrorKind::DuplicatePair: return "DuplicatePair";
    case ErrorKind::SelfPair: return "SelfPair";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegeneratePrior: return "DegeneratePrior";
    case ErrorKind::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorKind::CorruptModel: return "CorruptModel";
    case ErrorKind::Io: return "Io";
    case ErrorKind::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorKind::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

}  // namespace renyi
