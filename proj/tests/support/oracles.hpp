// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

// Naive reference implementations used only by tests. Each one is written
// directly from its formula with plain loops in long double; none of them
// shares code with the library.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "vtprune/costmodel.hpp"
#include "vtprune/layout.hpp"
#include "vtprune/tensors.hpp"
#include "vtprune/theory.hpp"

namespace vtprune::oracle {

using Real = long double;

inline Real dot(std::span<const float> a, std::span<const float> b) {
    Real s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<Real>(a[i]) * b[i];
    return s;
}

inline Real cosine(std::span<const float> a, std::span<const float> b) {
    return dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b)));
}

inline std::vector<Real> softmax(const std::vector<Real>& x) {
    Real m = x[0];
    for (Real v : x) m = std::max(m, v);
    std::vector<Real> out(x.size());
    Real z = 0;
    for (std::size_t i = 0; i < x.size(); ++i) z += out[i] = std::exp(x[i] - m);
    for (auto& v : out) v /= z;
    return out;
}

// softmax((z W_Q)(Z W_K)^T / sqrt(d)) with both products formed explicitly.
inline std::vector<Real> cls_attention(std::span<const float> z, const TokenMatrix& zv, const TokenMatrix& wq,
                                       const TokenMatrix& wk) {
    const std::size_t d = z.size();
    std::vector<Real> q(d, 0);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) q[j] += static_cast<Real>(z[i]) * wq(i, j);
    std::vector<Real> logits(zv.rows(), 0);
    for (std::size_t r = 0; r < zv.rows(); ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            Real k = 0;
            for (std::size_t i = 0; i < d; ++i) k += static_cast<Real>(zv(r, i)) * wk(i, j);
            logits[r] += q[j] * k;
        }
        logits[r] /= std::sqrt(static_cast<Real>(d));
    }
    return softmax(logits);
}

inline std::vector<std::size_t> indices_of(const IndexRange& r) {
    std::vector<std::size_t> v;
    for (std::size_t i = r.begin; i < r.end; ++i) v.push_back(i);
    return v;
}

// Cross-modal ratio: mass from `queries` rows onto `keys` columns over mass
// onto every prompt column.
inline Real cross_ratio(const TokenMatrix& a, const SequencePartitions& p, const IndexRange& queries,
                        const IndexRange& keys) {
    std::vector<std::size_t> prompt;
    for (const auto* r : {&p.system, &p.visual, &p.text})
        for (std::size_t i : indices_of(*r)) prompt.push_back(i);
    Real num = 0, den = 0;
    for (std::size_t i : indices_of(queries)) {
        for (std::size_t j : indices_of(keys)) num += a(i, j);
        for (std::size_t j : prompt) den += a(i, j);
    }
    return num / den;
}

inline unsigned __int128 prefill_flops(const StageConfig& c) {
    using U = unsigned __int128;
    const U t = c.layers, n = c.input_len, d = c.hidden, m = c.ffn;
    return t * (4 * n * d * d + 2 * n * n * d + 2 * n * d * m);
}

// Sum of the per-step decode cost over t = 1..L.
inline unsigned __int128 decode_flops_loop(const StageConfig& c) {
    using U = unsigned __int128;
    const U t = c.layers, n = c.input_len, d = c.hidden, m = c.ffn;
    U total = 0;
    for (U step = 1; step <= c.output_len; ++step) total += t * (4 * d * d + 2 * d * (n + step - 1) + 2 * d * m);
    return total;
}

inline std::vector<Real> project(const theory::Basis& w, std::span<const float> v) {
    std::vector<Real> out(w.rank, 0);
    for (std::size_t j = 0; j < w.rank; ++j)
        for (std::size_t i = 0; i < w.ambient; ++i) out[j] += static_cast<Real>(w(i, j)) * v[i];
    return out;
}

inline Real cosine(const std::vector<Real>& a, const std::vector<Real>& b) {
    Real ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

// (1/N^2) sum over ordered pairs i != j.
inline Real diversity(const TokenMatrix& v, const theory::Basis& w_v) {
    const std::size_t n = v.rows();
    Real s = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += cosine(project(w_v, v.row(i)), project(w_v, v.row(j)));
    return s / static_cast<Real>(n * n);
}

inline Real redundancy(const TokenMatrix& v, const TokenMatrix& t, const theory::Basis& w_t) {
    Real s = 0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
        Real rho = 0;
        for (std::size_t j = 0; j < t.rows(); ++j) rho += cosine(project(w_t, v.row(i)), project(w_t, t.row(j)));
        s += rho / static_cast<Real>(t.rows());
    }
    return s / static_cast<Real>(v.rows());
}

}  // namespace vtprune::oracle
