// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Levina-Bickel maximum-likelihood intrinsic dimension over encoder features.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <torch/torch.h>

namespace pastnet {

enum class DistanceKind {
    Angular,         // arccos of the cosine similarity
    OneMinusCosine,  // 1 - cos
    Euclidean,
};

/// Distances closer than this are treated as duplicates and skipped.
inline constexpr double kMinNeighborDistance = 1e-12;

struct DimEstimate {
    std::vector<double> local;  // one D_j per anchor that produced a defined estimate
    std::int64_t R = 0;
    std::int64_t J = 0;
    std::int64_t excluded = 0;  // anchors with an undefined estimate
    double mean = 0.0;
    std::int64_t D = 1;
};

/// sum_{m=1}^{R-1} log(d_R / d_m) over the first R usable distances of an
/// ascending neighbor list. nullopt when fewer than R usable distances remain.
std::optional<double> log_ratio_sum(std::span<const double> sorted_distances, std::int64_t R);

/// D_j = (R - 2) / log_ratio_sum. nullopt when the sum is zero (all
/// neighbors equidistant) or too few neighbors are usable.
std::optional<double> local_dim_from_distances(std::span<const double> sorted_distances, std::int64_t R);

/// Same, measuring distances from `anchor` to each neighbor row.
std::optional<double> local_dim_estimate(std::span<const double> anchor, const std::vector<std::vector<double>>& neighbors,
                                         std::int64_t R, DistanceKind kind = DistanceKind::Angular);

double vector_distance(std::span<const double> a, std::span<const double> b, DistanceKind kind);

/// D = max(1, ceil(mean of local)). Throws NumericalError when `local` is empty.
DimEstimate finalize_dim(std::vector<double> local, std::int64_t R, std::int64_t J, std::int64_t excluded = 0);

/// `features` is either (N, C) rows or (F, C, H', W') maps, in which case each
/// spatial location is one C-vector. Subsamples min(J, N) rows without
/// replacement using `seed`, then estimates within the subsample.
/// Throws ConfigError when J < R + 1, R < 3, or too few rows are available.
DimEstimate intrinsic_dim(const torch::Tensor& features, std::int64_t R, std::int64_t J, std::uint64_t seed,
                          DistanceKind kind = DistanceKind::Angular);

}  // namespace pastnet
