#pragma once

#include <stdexcept>
#include <string>

namespace hcrn {

/// Error categories. The numeric values double as CLI exit codes where a
/// category maps onto one (dimension/label/usage errors surface as config
/// errors at the command line).
enum class ErrorCode : int {
  kConfig = 2,
  kDataset = 3,
  kIntegrity = 4,
  kIo = 5,
  kDimension = 10,
  kLabel = 11,
  kUsage = 12,
  kIngestion = 13,
};

const char* error_code_name(ErrorCode code);

/// Exit status the CLI reports for an error of this category.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define HCRN_DEFINE_ERROR(Name, Code)                                         \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {}  \
  };

HCRN_DEFINE_ERROR(DimensionError, kDimension)
HCRN_DEFINE_ERROR(ConfigError, kConfig)
HCRN_DEFINE_ERROR(LabelError, kLabel)
HCRN_DEFINE_ERROR(DatasetError, kDataset)
HCRN_DEFINE_ERROR(IntegrityError, kIntegrity)
HCRN_DEFINE_ERROR(IoError, kIo)
HCRN_DEFINE_ERROR(UsageError, kUsage)
/// A file in a dataset tree could not be decoded.
HCRN_DEFINE_ERROR(IngestionError, kIngestion)

#undef HCRN_DEFINE_ERROR

}  // namespace hcrn
