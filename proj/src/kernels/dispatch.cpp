// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <string>

#include "kernels_impl.hpp"
#include "vtprune/error.hpp"
#include "vtprune/kernels.hpp"

namespace vtprune::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::dot, &scalar::sum, &scalar::gemv};
#if defined(VTPRUNE_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::dot, &avx2::sum, &avx2::gemv};
#endif
#if defined(VTPRUNE_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, &neon::dot, &neon::sum, &neon::gemv};
#endif

#if defined(VTPRUNE_HAVE_AVX2)
bool cpu_has_avx2() noexcept {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}
#endif

std::atomic<const KernelTable*>& active_slot() noexcept {
    static std::atomic<const KernelTable*> slot{table_for(best_isa())};
    return slot;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar: return &kScalar;
    case Isa::Avx2:
#if defined(VTPRUNE_HAVE_AVX2)
        return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
        return nullptr;
#endif
    case Isa::Neon:
#if defined(VTPRUNE_HAVE_NEON)
        return &kNeon;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

bool isa_supported(Isa isa) noexcept { return table_for(isa) != nullptr; }

Isa best_isa() noexcept {
    if (isa_supported(Isa::Avx2)) {
        return Isa::Avx2;
    }
    if (isa_supported(Isa::Neon)) {
        return Isa::Neon;
    }
    return Isa::Scalar;
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
    const KernelTable* table = table_for(isa);
    if (table == nullptr) {
        throw Error(ErrorKind::Usage, "kernel ISA '" + std::string(isa_name(isa)) + "' is not available on this host");
    }
    active_slot().store(table, std::memory_order_release);
}

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
    if (name == "scalar") return Isa::Scalar;
    if (name == "avx2") return Isa::Avx2;
    if (name == "neon") return Isa::Neon;
    if (name == "auto") return best_isa();
    return std::nullopt;
}

}  // namespace vtprune::kernels
