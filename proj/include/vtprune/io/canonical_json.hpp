// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "json.hpp"

namespace vtprune::io {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSignificantDigits = 9;

// Deterministic text form: insertion-ordered keys, two-space indent,
// integers verbatim, floating values with 9 significant digits, trailing
// newline.
std::string canonical_dump(const Json& value);

// Shortest "%.9g" rendering used by both JSON and CSV reports.
std::string format_real(double value);

}  // namespace vtprune::io
