// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sarcr {

// Broad failure classes. They map one-to-one onto the C API status codes
// and onto the CLI exit codes (config 2, data 3, numerical 4).
enum class ErrorClass {
  kInvalidArgument,
  kConfig,
  kData,
  kNumerical,
  kIo,
};

// Every error carries a short machine-readable kind such as
// "DegenerateProjection" or "TruncatedData" plus a human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), cls_(cls), kind_(std::move(kind)) {}

  ErrorClass errorClass() const noexcept { return cls_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorClass cls_;
  std::string kind_;
};

[[noreturn]] void fail(ErrorClass cls, const std::string& kind, const std::string& message);

}  // namespace sarcr
