// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/error.hpp"

namespace vtprune {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidLayout: return "InvalidLayout";
    case ErrorKind::InvalidPlan: return "InvalidPlan";
    case ErrorKind::TooShallow: return "TooShallow";
    case ErrorKind::EmptyThumbnail: return "EmptyThumbnail";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::EmptyPartition: return "EmptyPartition";
    case ErrorKind::MissingLayer: return "MissingLayer";
    case ErrorKind::NoDecodeRows: return "NoDecodeRows";
    case ErrorKind::OrthogonalityViolated: return "OrthogonalityViolated";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteData: return "NonFiniteData";
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::MissingInput: return "MissingInput";
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Internal: return 4;
    default: return 3;
    }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), m_kind(kind) {}

}  // namespace vtprune
