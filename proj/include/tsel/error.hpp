// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace tsel {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kDegenerateInput,
  kNotConverged,
  kCapExceeded,
  kIo,
  kBadMagic,
  kBadVersion,
  kTruncated,
  kNonFinite,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Solver failure that still carries enough context to diagnose it.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, std::size_t iterations, double residual)
      : Error(ErrorCode::kNotConverged, what),
        iterations_(iterations),
        residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

}  // namespace tsel
