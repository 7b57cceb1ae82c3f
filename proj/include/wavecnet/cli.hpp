// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wavecnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one command line. Results go to `out`, diagnostics to `err`.
/// Returns 0 on success, 1 on a usage error and 2 when the library fails.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wavecnet::cli
