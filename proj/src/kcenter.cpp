// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/kcenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vtprune/error.hpp"
#include "vtprune/kernels.hpp"

namespace vtprune {

namespace {

void check_request(const TokenMatrix& tokens, std::size_t pivot, std::size_t k) {
    if (k < 1 || k > tokens.rows()) {
        throw Error(ErrorKind::InvalidK,
                    "k = " + std::to_string(k) + " outside [1, " + std::to_string(tokens.rows()) + "]");
    }
    if (pivot >= tokens.rows()) {
        throw Error(ErrorKind::InvalidK,
                    "pivot " + std::to_string(pivot) + " outside [0, " + std::to_string(tokens.rows()) + ")");
    }
}

float pair_similarity(const TokenMatrix& tokens, std::size_t v, std::size_t c, SimilarityMode mode) {
    if (mode == SimilarityMode::Cosine) {
        return cosine_similarity(tokens.row(v), tokens.row(c));
    }
    return static_cast<float>(kernels::active().dot(tokens.row(v).data(), tokens.row(c).data(), tokens.cols()));
}

std::vector<double> unit_row(const TokenMatrix& tokens, std::size_t i) {
    const auto r = tokens.row(i);
    double norm = 0.0;
    for (float x : r) {
        norm += static_cast<double>(x) * x;
    }
    norm = std::sqrt(norm);
    if (norm <= kDegenerateNorm) {
        throw Error(ErrorKind::DegenerateVector, "row " + std::to_string(i) + " has zero norm");
    }
    std::vector<double> u(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
        u[j] = r[j] / norm;
    }
    return u;
}

std::vector<std::vector<double>> unit_rows(const TokenMatrix& tokens) {
    std::vector<std::vector<double>> out;
    out.reserve(tokens.rows());
    for (std::size_t i = 0; i < tokens.rows(); ++i) {
        out.push_back(unit_row(tokens, i));
    }
    return out;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

}  // namespace

RetentionSet greedy_kcenter(const TokenMatrix& tokens, std::size_t pivot, std::size_t k,
                            const KCenterOptions& options) {
    check_request(tokens, pivot, k);
    const std::size_t n = tokens.rows();
    const bool cosine = options.similarity == SimilarityMode::Cosine;
    const auto norms = cosine ? row_norms(tokens) : std::vector<double>{};
    const auto& kern = kernels::active();

    RetentionSet out;
    out.indices.reserve(k);
    out.trace.reserve(k - 1);

    std::vector<float> max_sim(n);
    std::vector<char> selected(n, 0);
    std::vector<double> dots(n);

    auto absorb = [&](std::size_t center, bool first) {
        kern.gemv(tokens.data().data(), n, tokens.cols(), tokens.row(center).data(), dots.data());
        for (std::size_t i = 0; i < n; ++i) {
            float s = 0.0f;
            if (cosine) {
                s = static_cast<float>(std::clamp(dots[i] / (norms[i] * norms[center]), -1.0, 1.0));
            } else {
                s = static_cast<float>(dots[i]);
            }
            max_sim[i] = first ? s : std::max(max_sim[i], s);
        }
        selected[center] = 1;
        out.indices.push_back(center);
    };

    absorb(pivot, true);
    while (out.indices.size() < k) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!selected[i] && (best == n || max_sim[i] < max_sim[best])) {
                best = i;
            }
        }
        out.trace.push_back({best, max_sim[best]});
        absorb(best, false);
    }
    return out;
}

RetentionSet oracle_greedy(const TokenMatrix& tokens, std::size_t pivot, std::size_t k,
                           const KCenterOptions& options) {
    if (tokens.rows() > kOracleMaxTokens) {
        throw Error(ErrorKind::InstanceTooLarge, "oracle limited to " + std::to_string(kOracleMaxTokens) +
                                                     " tokens, got " + std::to_string(tokens.rows()));
    }
    check_request(tokens, pivot, k);
    const std::size_t n = tokens.rows();
    RetentionSet out;
    out.indices.push_back(pivot);
    std::vector<char> selected(n, 0);
    selected[pivot] = 1;
    while (out.indices.size() < k) {
        std::size_t best = n;
        float best_value = std::numeric_limits<float>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (selected[v]) {
                continue;
            }
            float worst = -std::numeric_limits<float>::infinity();
            for (std::size_t c : out.indices) {
                worst = std::max(worst, pair_similarity(tokens, v, c, options.similarity));
            }
            if (best == n || worst < best_value) {
                best = v;
                best_value = worst;
            }
        }
        out.trace.push_back({best, best_value});
        out.indices.push_back(best);
        selected[best] = 1;
    }
    return out;
}

double chordal_distance(const TokenMatrix& tokens, std::size_t i, std::size_t j) {
    return distance(unit_row(tokens, i), unit_row(tokens, j));
}

double covering_radius(const TokenMatrix& tokens, std::span<const std::size_t> centers) {
    if (centers.empty()) {
        throw Error(ErrorKind::InvalidK, "covering radius needs at least one center");
    }
    const auto units = unit_rows(tokens);
    double radius = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t c : centers) {
            nearest = std::min(nearest, distance(units[i], units.at(c)));
        }
        radius = std::max(radius, nearest);
    }
    return radius;
}

double optimal_kcenter_radius(const TokenMatrix& tokens, std::size_t k) {
    const std::size_t n = tokens.rows();
    if (n > kExhaustiveMaxTokens || k > kExhaustiveMaxK) {
        throw Error(ErrorKind::InstanceTooLarge, "exhaustive k-center limited to n <= " +
                                                     std::to_string(kExhaustiveMaxTokens) + ", k <= " +
                                                     std::to_string(kExhaustiveMaxK));
    }
    if (k < 1 || k > n) {
        throw Error(ErrorKind::InvalidK, "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    const auto units = unit_rows(tokens);
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[i][j] = dist[j][i] = distance(units[i], units[j]);
        }
    }
    // Walk all k-subsets in lexicographic order via a selection mask.
    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), 1);
    double best = std::numeric_limits<double>::infinity();
    do {
        double radius = 0.0;
        for (std::size_t i = 0; i < n && radius < best; ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < n; ++c) {
                if (mask[c]) {
                    nearest = std::min(nearest, dist[i][c]);
                }
            }
            radius = std::max(radius, nearest);
        }
        best = std::min(best, radius);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

}  // namespace vtprune
