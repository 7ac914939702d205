// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/common/error.hpp"

namespace terra {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::argument: return "argument";
    case ErrorCode::out_of_bounds: return "out_of_bounds";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::version: return "version";
    case ErrorCode::digest: return "digest";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + " error: " + what), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace terra
