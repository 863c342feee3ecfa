#include "hcrn/error.hpp"

namespace hcrn {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "E_CONFIG";
    case ErrorCode::kDataset: return "E_DATASET";
    case ErrorCode::kIntegrity: return "E_INTEGRITY";
    case ErrorCode::kIo: return "E_IO";
    case ErrorCode::kDimension: return "E_DIMENSION";
    case ErrorCode::kLabel: return "E_LABEL";
    case ErrorCode::kUsage: return "E_USAGE";
    case ErrorCode::kIngestion: return "E_INGESTION";
  }
  return "E_UNKNOWN";
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDataset:
    case ErrorCode::kIngestion:
    case ErrorCode::kLabel:
      return 3;
    case ErrorCode::kIntegrity: return 4;
    case ErrorCode::kIo: return 5;
    default: return 2;
  }
}

}  // namespace hcrn
