// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace soup::cli {

/// Exit codes of the `soup` tool.
enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,    // bad flags, configs, datasets or caches
  kScorerError = 2,   // scorer or encoder unreachable or misbehaving
  kNoGoldLabels = 3,  // evaluation without gold labels
};

/// Runs `soup <command> [flags]`. Reports go to files or `out`; progress
/// and errors go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace soup::cli
