#include "saw/errors.hpp"

namespace saw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnbalancedPanel: return "UnbalancedPanel";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::InvalidPanel: return "InvalidPanel";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonDyadicLength: return "NonDyadicLength";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NonRealResult: return "NonRealResult";
    case ErrorCode::RankDeficientFirstStage: return "RankDeficientFirstStage";
    case ErrorCode::EmptySegment: return "EmptySegment";
    case ErrorCode::CollinearDesign: return "CollinearDesign";
    case ErrorCode::SingularCrossProduct: return "SingularCrossProduct";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace saw
