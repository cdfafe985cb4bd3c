#pragma once

#include <stdexcept>
#include <string>

namespace nlab {

// Numeric codes shared with the C API (see normlab.h).
enum class ErrorCode : int {
  kOk = 0,
  kSyntax = 1,
  kDimension = 2,
  kMixedRepresentation = 3,
  kEval = 4,
  kSingularMetric = 5,
  kNonConvergence = 6,
  kDegeneratePoint = 7,
  kMissingJets = 8,
  kMissingGaugeTensor = 9,
  kAsymmetricGauge = 10,
  kDegenerateSurface = 11,
  kIntegrationFailure = 12,
  kFile = 13,
  kValidation = 14,
  kInvalidArgument = 15,
  kInternal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  int line_;
  int column_;
};

#define NLAB_DEFINE_ERROR(Name, Code)                                    \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  };

NLAB_DEFINE_ERROR(DimensionError, kDimension)
NLAB_DEFINE_ERROR(MixedRepresentationError, kMixedRepresentation)
NLAB_DEFINE_ERROR(EvalError, kEval)
NLAB_DEFINE_ERROR(SingularMetric, kSingularMetric)
NLAB_DEFINE_ERROR(NonConvergence, kNonConvergence)
NLAB_DEFINE_ERROR(DegeneratePoint, kDegeneratePoint)
NLAB_DEFINE_ERROR(MissingJets, kMissingJets)
NLAB_DEFINE_ERROR(MissingGaugeTensor, kMissingGaugeTensor)
NLAB_DEFINE_ERROR(AsymmetricGauge, kAsymmetricGauge)
NLAB_DEFINE_ERROR(DegenerateSurface, kDegenerateSurface)
NLAB_DEFINE_ERROR(IntegrationFailure, kIntegrationFailure)
NLAB_DEFINE_ERROR(FileError, kFile)
NLAB_DEFINE_ERROR(ValidationError, kValidation)
NLAB_DEFINE_ERROR(InvalidArgument, kInvalidArgument)

#undef NLAB_DEFINE_ERROR

}  // namespace nlab
