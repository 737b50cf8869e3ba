// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pastnet::metrics {

/// Read-only view of a (T, C, H, W) frame sequence. Several sequences can be
/// passed at once by folding them into T.
struct VideoView {
    std::span<const float> data;
    std::array<std::int64_t, 4> shape;  // T, C, H, W

    std::int64_t frames() const { return shape[0]; }
    std::int64_t frame_size() const { return shape[1] * shape[2] * shape[3]; }
    std::int64_t plane_size() const { return shape[2] * shape[3]; }
};

/// Single-channel H x W plane.
struct Plane {
    std::span<const float> data;
    std::int64_t height;
    std::int64_t width;
};

enum class Reduction {
    PerPixelMean,  // mean over every element
    PerFrameSum,   // sum over (C, H, W), mean over frames
};

struct PixelErrors {
    double mse;
    double mae;
};

PixelErrors pixel_errors(const VideoView& pred, const VideoView& target, Reduction reduction);

struct SsimOptions {
    std::int64_t window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Details of how a structural-similarity value was computed.
struct SsimInfo {
    std::int64_t window = 0;
    int scales = 0;
    std::vector<double> weights;
    std::vector<std::string> warnings;
};

double ssim(const Plane& pred, const Plane& target, double data_range, const SsimOptions& opt = {},
            SsimInfo* info = nullptr);

/// Multi-scale SSIM with the standard five weights; when the plane is too
/// small for five scales the leading weights are kept and renormalized.
double ms_ssim(const Plane& pred, const Plane& target, double data_range, const SsimOptions& opt = {},
               SsimInfo* info = nullptr);

inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

/// 10 log10(range^2 / mse) with per-pixel mean mse; +inf for identical input.
double psnr(const VideoView& pred, const VideoView& target, double data_range);

/// ||y - y_hat||_2 / ||y - mean(y)||_2. Throws std::domain_error for a
/// constant target.
double relative_l2(const VideoView& pred, const VideoView& target);

struct FrameMetrics {
    double mse_pixel;
    double mae_pixel;
    double ssim;
    double psnr;
};

struct MetricReport {
    double mse_pixel = 0;
    double mse_frame_sum = 0;
    double mae_pixel = 0;
    double mae_frame_sum = 0;
    double ssim = 0;
    double ms_ssim = 0;
    double psnr = 0;
    double rel_l2 = 0;
    std::vector<FrameMetrics> per_frame;
    nlohmann::json conventions = nlohmann::json::object();

    /// Fixed key set; psnr of identical inputs is written as "inf". The
    /// per-frame breakdown is nested under conventions.per_frame.
    nlohmann::json to_json() const;
    static MetricReport from_json(const nlohmann::json& j);
};

/// Computes every metric. SSIM-family values are averaged over frames and
/// channels.
MetricReport evaluate(const VideoView& pred, const VideoView& target, double data_range);

}  // namespace pastnet::metrics
