// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "pastnet/intrinsic_dim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pastnet/error.hpp"

namespace pastnet {

namespace {

void check_neighbors(std::int64_t R) {
    if (R < 3) throw ConfigError("lb_neighbors (R) must be >= 3, got " + std::to_string(R));
}

double norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

}  // namespace

std::optional<double> log_ratio_sum(std::span<const double> sorted_distances, std::int64_t R) {
    check_neighbors(R);
    std::vector<double> usable;
    usable.reserve(static_cast<std::size_t>(R));
    for (double d : sorted_distances) {
        if (!(d > kMinNeighborDistance)) continue;
        usable.push_back(d);
        if (static_cast<std::int64_t>(usable.size()) == R) break;
    }
    if (static_cast<std::int64_t>(usable.size()) < R) return std::nullopt;
    const double dR = usable.back();
    double s = 0.0;
    for (std::int64_t m = 0; m + 1 < R; ++m) s += std::log(dR / usable[static_cast<std::size_t>(m)]);
    return s;
}

std::optional<double> local_dim_from_distances(std::span<const double> sorted_distances, std::int64_t R) {
    const auto s = log_ratio_sum(sorted_distances, R);
    if (!s || !(*s > 0.0)) return std::nullopt;
    return static_cast<double>(R - 2) / *s;
}

double vector_distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
    if (a.size() != b.size()) throw ShapeError("vector_distance: dimension mismatch");
    if (kind == DistanceKind::Euclidean) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(s);
    }
    const double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) return std::nan("");
    if (kind == DistanceKind::OneMinusCosine) {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return 1.0 - std::clamp(dot / (na * nb), -1.0, 1.0);
    }
    // 2 asin(|a^ - b^| / 2) keeps precision for small angles where acos does not.
    double chord = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] / na - b[i] / nb;
        chord += d * d;
    }
    return 2.0 * std::asin(std::min(1.0, std::sqrt(chord) / 2.0));
}

std::optional<double> local_dim_estimate(std::span<const double> anchor, const std::vector<std::vector<double>>& neighbors,
                                         std::int64_t R, DistanceKind kind) {
    std::vector<double> d;
    d.reserve(neighbors.size());
    for (const auto& n : neighbors) {
        const double v = vector_distance(anchor, n, kind);
        if (std::isfinite(v)) d.push_back(v);
    }
    std::sort(d.begin(), d.end());
    return local_dim_from_distances(d, R);
}

DimEstimate finalize_dim(std::vector<double> local, std::int64_t R, std::int64_t J, std::int64_t excluded) {
    if (local.empty()) throw NumericalError("intrinsic_dim: no anchor produced a defined local estimate");
    DimEstimate e;
    e.R = R;
    e.J = J;
    e.excluded = excluded;
    e.mean = std::accumulate(local.begin(), local.end(), 0.0) / static_cast<double>(local.size());
    e.D = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(e.mean)));
    e.local = std::move(local);
    return e;
}

DimEstimate intrinsic_dim(const torch::Tensor& features, std::int64_t R, std::int64_t J, std::uint64_t seed,
                          DistanceKind kind) {
    check_neighbors(R);
    if (J < R + 1) throw ConfigError("lb_sample (J) must be >= R + 1 = " + std::to_string(R + 1) + ", got " + std::to_string(J));
    torch::Tensor rows;
    if (features.dim() == 2) {
        rows = features;
    } else if (features.dim() == 4) {
        rows = features.permute({0, 2, 3, 1}).reshape({-1, features.size(1)});
    } else {
        throw ShapeError("intrinsic_dim: expected (N, C) or (F, C, H, W) features");
    }
    rows = rows.detach().to(torch::kCPU, torch::kDouble).contiguous();
    const auto n = rows.size(0), c = rows.size(1);
    const auto J_eff = std::min(J, n);
    if (J_eff < R + 1)
        throw ConfigError("intrinsic_dim: only " + std::to_string(n) + " feature vectors, need at least R + 1 = " +
                          std::to_string(R + 1));

    // Partial Fisher-Yates: the first J_eff entries are a uniform sample without replacement.
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::int64_t i = 0; i < J_eff; ++i) {
        std::uniform_int_distribution<std::int64_t> pick(i, n - 1);
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
    }
    const double* base = rows.data_ptr<double>();
    auto row = [&](std::int64_t k) {
        return std::span<const double>(base + order[static_cast<std::size_t>(k)] * c, static_cast<std::size_t>(c));
    };

    std::vector<double> local;
    std::int64_t excluded = 0;
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(J_eff));
    for (std::int64_t j = 0; j < J_eff; ++j) {
        d.clear();
        const auto a = row(j);
        for (std::int64_t k = 0; k < J_eff; ++k) {
            if (k == j) continue;
            const double v = vector_distance(a, row(k), kind);
            if (std::isfinite(v)) d.push_back(v);
        }
        const auto take = std::min<std::size_t>(d.size(), static_cast<std::size_t>(R) + d.size() / 8 + 8);
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take), d.end());
        auto est = local_dim_from_distances(std::span<const double>(d.data(), take), R);
        if (!est && take < d.size()) {
            // Many duplicates: fall back to the full ordering.
            std::sort(d.begin(), d.end());
            est = local_dim_from_distances(d, R);
        }
        if (est)
            local.push_back(*est);
        else
            ++excluded;
    }
    return finalize_dim(std::move(local), R, J_eff, excluded);
}

}  // namespace pastnet
