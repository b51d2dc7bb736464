// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/theory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "vtprune/error.hpp"

namespace vtprune::theory {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

double kernel_value(const std::vector<double>& a, const std::vector<double>& b, KernelForm form) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double c = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
    return form == KernelForm::Cosine ? c : 0.5 * (1.0 + c);
}

std::vector<std::vector<double>> projected_rows(const TokenMatrix& m, const Basis& w) {
    if (m.cols() != w.ambient) {
        throw Error(ErrorKind::DimensionMismatch, "token dim " + std::to_string(m.cols()) + " vs basis ambient dim " +
                                                      std::to_string(w.ambient));
    }
    std::vector<std::vector<double>> out;
    out.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto p = w.project(m.row(i));
        double norm = 0.0;
        for (double x : p) {
            norm += x * x;
        }
        if (std::sqrt(norm) <= kDegenerateNorm) {
            throw Error(ErrorKind::DegenerateVector, "projection of token " + std::to_string(i) + " collapses to zero");
        }
        out.push_back(std::move(p));
    }
    return out;
}

double column_dot(const Basis& a, std::size_t i, const Basis& b, std::size_t j) {
    double acc = 0.0;
    for (std::size_t r = 0; r < a.ambient; ++r) {
        acc += a(r, i) * b(r, j);
    }
    return acc;
}

TokenMatrix gaussian_tokens(std::size_t count, std::size_t dim, std::mt19937_64& rng,
                            const std::vector<double>* shift, double strength) {
    std::normal_distribution<double> normal(0.0, 1.0);
    TokenMatrix m(count, dim);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            double x = normal(rng);
            if (shift != nullptr) {
                x += strength * (*shift)[j];
            }
            m(i, j) = static_cast<float>(x);
        }
    }
    return m;
}

MeasurePair one_trial(const LemmaTrial& trial, std::size_t index) {
    auto rng = stream(trial.seed, index);
    const std::size_t dim = trial.w_v.ambient;
    TokenMatrix visual;
    TokenMatrix text;
    if (trial.generator == TokenGenerator::Isotropic) {
        visual = gaussian_tokens(trial.visual_tokens, dim, rng, nullptr, 0.0);
        text = gaussian_tokens(trial.text_tokens, dim, rng, nullptr, 0.0);
    } else {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 3.0);
        std::vector<double> direction(dim);
        for (auto& x : direction) {
            x = normal(rng);
        }
        const double strength = uniform(rng);
        visual = gaussian_tokens(trial.visual_tokens, dim, rng, &direction, strength);
        text = gaussian_tokens(trial.text_tokens, dim, rng, &direction, strength);
    }
    return {diversity_measure(visual, trial.w_v, trial.kernel),
            cross_redundancy_measure(visual, text, trial.w_t, trial.kernel)};
}

}  // namespace

std::vector<double> Basis::project(std::span<const float> v) const {
    std::vector<double> out(rank, 0.0);
    for (std::size_t i = 0; i < ambient; ++i) {
        const double x = v[i];
        for (std::size_t j = 0; j < rank; ++j) {
            out[j] += data[i * rank + j] * x;
        }
    }
    return out;
}

void check_bases(const Basis& w_v, const Basis& w_t, bool require_cross) {
    if (w_v.ambient != w_t.ambient || w_v.rank == 0 || w_t.rank == 0) {
        throw Error(ErrorKind::OrthogonalityViolated, "bases must share an ambient dim and have rank >= 1");
    }
    for (const Basis* w : {&w_v, &w_t}) {
        for (std::size_t i = 0; i < w->rank; ++i) {
            for (std::size_t j = i; j < w->rank; ++j) {
                const double expected = i == j ? 1.0 : 0.0;
                if (std::abs(column_dot(*w, i, *w, j) - expected) > kOrthogonalityTolerance) {
                    throw Error(ErrorKind::OrthogonalityViolated, "basis columns " + std::to_string(i) + ", " +
                                                                      std::to_string(j) + " are not orthonormal");
                }
            }
        }
    }
    if (!require_cross) {
        return;
    }
    for (std::size_t i = 0; i < w_v.rank; ++i) {
        for (std::size_t j = 0; j < w_t.rank; ++j) {
            const double c = column_dot(w_v, i, w_t, j);
            if (std::abs(c) > kOrthogonalityTolerance) {
                throw Error(ErrorKind::OrthogonalityViolated, "W_V^T W_T entry (" + std::to_string(i) + ", " +
                                                                  std::to_string(j) + ") = " + std::to_string(c));
            }
        }
    }
}

std::pair<Basis, Basis> orthogonal_bases(std::size_t ambient, std::size_t rank_v, std::size_t rank_t,
                                         std::uint64_t seed) {
    if (rank_v == 0 || rank_t == 0 || rank_v + rank_t > ambient) {
        throw Error(ErrorKind::DimensionMismatch, "need 1 <= ranks and rank_v + rank_t <= ambient");
    }
    const std::size_t cols = rank_v + rank_t;
    auto rng = stream(seed, 0xB45Eull);
    std::normal_distribution<double> normal(0.0, 1.0);
    // Column-major scratch for modified Gram-Schmidt, two passes for accuracy.
    std::vector<std::vector<double>> q(cols, std::vector<double>(ambient));
    for (auto& c : q) {
        for (auto& x : c) {
            x = normal(rng);
        }
    }
    for (std::size_t j = 0; j < cols; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                double proj = 0.0;
                for (std::size_t r = 0; r < ambient; ++r) {
                    proj += q[i][r] * q[j][r];
                }
                for (std::size_t r = 0; r < ambient; ++r) {
                    q[j][r] -= proj * q[i][r];
                }
            }
        }
        double norm = 0.0;
        for (double x : q[j]) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto& x : q[j]) {
            x /= norm;
        }
    }
    auto take = [&](std::size_t first, std::size_t rank) {
        Basis b{ambient, rank, std::vector<double>(ambient * rank)};
        for (std::size_t r = 0; r < ambient; ++r) {
            for (std::size_t j = 0; j < rank; ++j) {
                b.data[r * rank + j] = q[first + j][r];
            }
        }
        return b;
    };
    return {take(0, rank_v), take(rank_v, rank_t)};
}

double diversity_measure(const TokenMatrix& visual, const Basis& w_v, KernelForm kernel) {
    const std::size_t n = visual.rows();
    if (n < 2) {
        throw Error(ErrorKind::DimensionMismatch, "diversity needs at least 2 visual tokens");
    }
    const auto p = projected_rows(visual, w_v);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            total += kernel_value(p[i], p[j], kernel);
        }
    }
    // i != j counts every unordered pair twice.
    return 2.0 * total / static_cast<double>(n * n);
}

double cross_redundancy_measure(const TokenMatrix& visual, const TokenMatrix& text, const Basis& w_t,
                                KernelForm kernel) {
    if (visual.rows() == 0 || text.rows() == 0) {
        throw Error(ErrorKind::DimensionMismatch, "redundancy needs at least one visual and one text token");
    }
    const auto pv = projected_rows(visual, w_t);
    const auto pt = projected_rows(text, w_t);
    double total = 0.0;
    for (const auto& v : pv) {
        double rho = 0.0;
        for (const auto& t : pt) {
            rho += kernel_value(v, t, kernel);
        }
        total += rho / static_cast<double>(pt.size());
    }
    return total / static_cast<double>(pv.size());
}

LemmaTrial orthogonal_trial(std::size_t visual_tokens, std::size_t text_tokens, std::size_t ambient,
                            std::size_t rank_v, std::size_t rank_t, std::uint64_t seed) {
    auto [w_v, w_t] = orthogonal_bases(ambient, rank_v, rank_t, seed);
    LemmaTrial t;
    t.visual_tokens = visual_tokens;
    t.text_tokens = text_tokens;
    t.w_v = std::move(w_v);
    t.w_t = std::move(w_t);
    t.seed = seed;
    return t;
}

LemmaTrial correlated_control(std::size_t visual_tokens, std::size_t text_tokens, std::size_t ambient,
                              std::size_t rank, std::uint64_t seed) {
    auto t = orthogonal_trial(visual_tokens, text_tokens, ambient, rank, 1, seed);
    t.w_t = t.w_v;
    t.generator = TokenGenerator::SharedDirection;
    t.require_orthogonal = false;
    return t;
}

std::vector<MeasurePair> draw_measures(const LemmaTrial& trial, std::size_t num_trials) {
    std::vector<MeasurePair> out(num_trials);
    const std::size_t workers = std::clamp<std::size_t>(trial.threads, 1, std::max<std::size_t>(num_trials, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < num_trials; ++i) {
            out[i] = one_trial(trial, i);
        }
        return out;
    }
    std::vector<std::exception_ptr> failures(workers);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (num_trials + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    const std::size_t end = std::min(num_trials, (w + 1) * chunk);
                    for (std::size_t i = w * chunk; i < end; ++i) {
                        out[i] = one_trial(trial, i);
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    return out;
}

double sample_covariance(std::span<const MeasurePair> pairs) {
    const std::size_t n = pairs.size();
    if (n < 2) {
        return 0.0;
    }
    double mx = 0.0;
    double my = 0.0;
    for (const auto& p : pairs) {
        mx += p.diversity;
        my += p.redundancy;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double acc = 0.0;
    for (const auto& p : pairs) {
        acc += (p.diversity - mx) * (p.redundancy - my);
    }
    return acc / static_cast<double>(n - 1);
}

double bootstrap_standard_error(std::span<const MeasurePair> pairs, std::size_t resamples, std::uint64_t seed) {
    if (pairs.size() < 2 || resamples < 2) {
        return 0.0;
    }
    auto rng = stream(seed, 0xB007ull);
    std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
    std::vector<MeasurePair> sample(pairs.size());
    std::vector<double> covs(resamples);
    for (auto& c : covs) {
        for (auto& s : sample) {
            s = pairs[pick(rng)];
        }
        c = sample_covariance(sample);
    }
    double mean = 0.0;
    for (double c : covs) {
        mean += c;
    }
    mean /= static_cast<double>(resamples);
    double var = 0.0;
    for (double c : covs) {
        var += (c - mean) * (c - mean);
    }
    return std::sqrt(var / static_cast<double>(resamples - 1));
}

CovarianceResult covariance_experiment(const LemmaTrial& trial, std::size_t num_trials) {
    if (num_trials < kMinTrials) {
        throw Error(ErrorKind::InvalidPlan, "covariance experiment needs at least " + std::to_string(kMinTrials) +
                                                " trials, got " + std::to_string(num_trials));
    }
    check_bases(trial.w_v, trial.w_t, trial.require_orthogonal);
    const auto pairs = draw_measures(trial, num_trials);
    CovarianceResult r;
    r.trials = num_trials;
    r.sample_cov = sample_covariance(pairs);
    r.standard_error = bootstrap_standard_error(pairs, trial.bootstrap_resamples, trial.seed);
    for (const auto& p : pairs) {
        r.mean_diversity += p.diversity;
        r.mean_redundancy += p.redundancy;
    }
    r.mean_diversity /= static_cast<double>(num_trials);
    r.mean_redundancy /= static_cast<double>(num_trials);
    return r;
}

}  // namespace vtprune::theory
