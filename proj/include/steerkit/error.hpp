// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace steer {

enum class ErrorCode {
  kDegenerateInput,
  kInvalidValue,
  kShape,
  kZeroNorm,
  kNoPairsPossible,
  kAllZeroQuality,
  kAxisMismatch,
  kConfig,
  kSequenceTooLong,
  kFormat,
  kUnexpectedEof,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

/// Base of every error the library throws. `code()` identifies the failure
/// class; the CLI prints it as a machine-parsable `kind=` field.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define STEERKIT_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& message) : Error(Code, message) {}     \
  };

STEERKIT_DEFINE_ERROR(DegenerateInput, ErrorCode::kDegenerateInput)
STEERKIT_DEFINE_ERROR(InvalidValue, ErrorCode::kInvalidValue)
STEERKIT_DEFINE_ERROR(ShapeError, ErrorCode::kShape)
STEERKIT_DEFINE_ERROR(ZeroNormError, ErrorCode::kZeroNorm)
STEERKIT_DEFINE_ERROR(NoPairsPossible, ErrorCode::kNoPairsPossible)
STEERKIT_DEFINE_ERROR(AllZeroQuality, ErrorCode::kAllZeroQuality)
STEERKIT_DEFINE_ERROR(AxisMismatch, ErrorCode::kAxisMismatch)
STEERKIT_DEFINE_ERROR(ConfigError, ErrorCode::kConfig)
STEERKIT_DEFINE_ERROR(SequenceTooLong, ErrorCode::kSequenceTooLong)
STEERKIT_DEFINE_ERROR(FormatError, ErrorCode::kFormat)
STEERKIT_DEFINE_ERROR(UnexpectedEof, ErrorCode::kUnexpectedEof)
STEERKIT_DEFINE_ERROR(IoError, ErrorCode::kIo)

#undef STEERKIT_DEFINE_ERROR

}  // namespace steer
