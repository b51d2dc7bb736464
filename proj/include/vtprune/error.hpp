// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vtprune {

enum class ErrorKind {
    DegenerateVector,
    DimensionMismatch,
    InvalidLayout,
    InvalidPlan,
    TooShallow,
    EmptyThumbnail,
    InvalidK,
    InstanceTooLarge,
    EmptyPartition,
    MissingLayer,
    NoDecodeRows,
    OrthogonalityViolated,
    ParseError,
    ShapeMismatch,
    NonFiniteData,
    RowSumViolation,
    Overflow,
    MissingInput,
    Usage,
    Internal,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Process exit code for a failure of this kind: 2 usage, 3 data validation,
// 4 internal invariant violation.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

}  // namespace vtprune
