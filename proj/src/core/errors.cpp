// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/errors.hpp"

namespace sarcr {

void fail(ErrorClass cls, const std::string& kind, const std::string& message) {
  throw Error(cls, kind, message);
}

}  // namespace sarcr
