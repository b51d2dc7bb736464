// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

// Dense inner-loop kernels. Every kernel accumulates in double precision and
// sums in a fixed order per ISA, so results are deterministic for a given
// backend. The scalar table is the reference; SIMD tables must agree with it
// to within rounding of the reassociated sum.
namespace vtprune::kernels {

enum class Isa { Scalar, Avx2, Neon };

using DotFn = double (*)(const float* a, const float* b, std::size_t n) noexcept;
using SumFn = double (*)(const float* a, std::size_t n) noexcept;
// out[r] = dot(matrix row r, v) for r in [0, rows); rows are `cols` apart.
using GemvFn = void (*)(const float* matrix, std::size_t rows, std::size_t cols,
                        const float* v, double* out) noexcept;

struct KernelTable {
    Isa isa;
    DotFn dot;
    SumFn sum;
    GemvFn gemv;
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* table_for(Isa isa) noexcept;

bool isa_supported(Isa isa) noexcept;
Isa best_isa() noexcept;

// Table used by the library. Defaults to best_isa().
const KernelTable& active() noexcept;

// Throws Error(Usage) if the ISA is unsupported on this host.
void set_active_isa(Isa isa);

std::string_view isa_name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

}  // namespace vtprune::kernels
