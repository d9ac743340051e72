#pragma once

#include <stdexcept>
#include <string>

namespace mmeval {

/// Exit-code family of an error; the CLI maps these to process exit codes.
enum class ErrorClass : int {
  kParse = 2,
  kParameter = 3,
  kInternal = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& what)
      : std::runtime_error(what), cls_(cls), kind_(std::move(kind)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorClass cls_;
  std::string kind_;
};

#define MMEVAL_DEFINE_ERROR(Name, Class)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(Class, #Name, what) {}  \
  };

// Malformed input.
MMEVAL_DEFINE_ERROR(ParseError, ErrorClass::kParse)
MMEVAL_DEFINE_ERROR(FormatError, ErrorClass::kParse)
MMEVAL_DEFINE_ERROR(VersionError, ErrorClass::kParse)

// Well-formed input that violates a precondition.
MMEVAL_DEFINE_ERROR(ParamError, ErrorClass::kParameter)
MMEVAL_DEFINE_ERROR(DepthError, ErrorClass::kParameter)
MMEVAL_DEFINE_ERROR(DegreeError, ErrorClass::kParameter)
MMEVAL_DEFINE_ERROR(DimensionError, ErrorClass::kParameter)
MMEVAL_DEFINE_ERROR(DuplicateNodeError, ErrorClass::kParameter)
MMEVAL_DEFINE_ERROR(InsufficientDataError, ErrorClass::kParameter)

// Broken internal invariants. None of these should fire on valid input.
MMEVAL_DEFINE_ERROR(MembershipError, ErrorClass::kInternal)
MMEVAL_DEFINE_ERROR(MissingDerivativeError, ErrorClass::kInternal)
MMEVAL_DEFINE_ERROR(SingularSystemError, ErrorClass::kInternal)
MMEVAL_DEFINE_ERROR(VerificationError, ErrorClass::kInternal)
MMEVAL_DEFINE_ERROR(InvariantError, ErrorClass::kInternal)

#undef MMEVAL_DEFINE_ERROR

}  // namespace mmeval
