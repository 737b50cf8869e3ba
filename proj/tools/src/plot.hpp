// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal raster plots written as PNG: a line chart for loss curves and a
// grid of grayscale frames.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace pastnet::cli {

struct Image {
    std::int64_t width = 0;
    std::int64_t height = 0;
    int channels = 3;  // 1 gray, 3 RGB
    std::vector<std::uint8_t> pixels;

    Image(std::int64_t w, std::int64_t h, int c, std::uint8_t fill = 255);
    std::uint8_t* at(std::int64_t x, std::int64_t y) { return &pixels[static_cast<std::size_t>((y * width + x) * channels)]; }
};

void write_png(const Image& img, const std::filesystem::path& path);

/// Polyline of `values` against their index; log10 y-axis when every value
/// is positive and `log_y` is set.
Image line_chart(const std::vector<double>& values, std::int64_t width, std::int64_t height, bool log_y = true);

/// Rows of equally sized H x W frames mapped from [lo, hi] to gray, each
/// pixel repeated `zoom` times, 2-pixel gaps between tiles.
Image frame_grid(const std::vector<std::vector<std::vector<float>>>& rows, std::int64_t h, std::int64_t w, double lo,
                 double hi, std::int64_t zoom);

}  // namespace pastnet::cli
