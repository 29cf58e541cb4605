#include "ddelast/errors.hpp"

namespace ddelast {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kConfig: return "CONFIG";
    case ErrorCode::kParse: return "PARSE";
    case ErrorCode::kIo: return "IO";
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kDiverged: return "DIVERGED";
    case ErrorCode::kSingular: return "SINGULAR";
    case ErrorCode::kNoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::kIllPosed: return "ILL_POSED";
    case ErrorCode::kBudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::kAllFailed: return "ALL_FAILED";
  }
  return "UNKNOWN";
}

}  // namespace ddelast
