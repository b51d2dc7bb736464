// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace vtprune::io {

// Entry point of the `vtprune` tool. Returns the process exit code:
// 0 success, 2 usage error, 3 data validation error, 4 internal invariant
// violation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vtprune::io
