// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include <png.h>

namespace pastnet::cli {

Image::Image(std::int64_t w, std::int64_t h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w * h * c), fill) {}

void write_png(const Image& img, const std::filesystem::path& path) {
    std::unique_ptr<FILE, decltype(&std::fclose)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw std::runtime_error("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("libpng: allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng: failed writing " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::int64_t y = 0; y < img.height; ++y)
        png_write_row(png, img.pixels.data() + static_cast<std::size_t>(y * img.width * img.channels));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

namespace {

void put(Image& img, std::int64_t x, std::int64_t y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    auto* p = img.at(x, y);
    p[0] = r;
    if (img.channels == 3) {
        p[1] = g;
        p[2] = b;
    }
}

void line(Image& img, std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1) {
    const std::int64_t dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const std::int64_t sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    std::int64_t err = dx + dy;
    for (;;) {
        put(img, x0, y0, 31, 119, 180);
        if (x0 == x1 && y0 == y1) break;
        const auto e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

}  // namespace

Image line_chart(const std::vector<double>& values, std::int64_t width, std::int64_t height, bool log_y) {
    Image img(width, height, 3);
    const std::int64_t m = 24;  // margin
    for (std::int64_t x = m; x < width - m; ++x) put(img, x, height - m, 0, 0, 0);
    for (std::int64_t y = m; y <= height - m; ++y) put(img, m, y, 0, 0, 0);

    std::vector<double> v;
    for (double x : values)
        if (std::isfinite(x)) v.push_back(x);
    if (v.empty()) return img;
    const bool use_log = log_y && std::all_of(v.begin(), v.end(), [](double x) { return x > 0; });
    if (use_log)
        for (auto& x : v) x = std::log10(x);
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, span = *hi_it > lo ? *hi_it - lo : 1.0;

    // light grid at each decade on a log axis
    if (use_log)
        for (double d = std::ceil(lo); d <= *hi_it; d += 1.0) {
            const auto y = height - m - static_cast<std::int64_t>((d - lo) / span * static_cast<double>(height - 2 * m));
            for (std::int64_t x = m + 1; x < width - m; x += 2) put(img, x, y, 200, 200, 200);
        }

    const double n = static_cast<double>(std::max<std::size_t>(v.size() - 1, 1));
    auto px = [&](std::size_t i) { return m + static_cast<std::int64_t>(static_cast<double>(i) / n * static_cast<double>(width - 2 * m)); };
    auto py = [&](double y) { return height - m - static_cast<std::int64_t>((y - lo) / span * static_cast<double>(height - 2 * m)); };
    if (v.size() == 1) put(img, px(0), py(v[0]), 31, 119, 180);
    for (std::size_t i = 1; i < v.size(); ++i) line(img, px(i - 1), py(v[i - 1]), px(i), py(v[i]));
    return img;
}

Image frame_grid(const std::vector<std::vector<std::vector<float>>>& rows, std::int64_t h, std::int64_t w, double lo,
                 double hi, std::int64_t zoom) {
    const std::int64_t gap = 2;
    std::size_t cols = 0;
    for (const auto& r : rows) cols = std::max(cols, r.size());
    const auto nc = static_cast<std::int64_t>(cols), nr = static_cast<std::int64_t>(rows.size());
    Image img(std::max<std::int64_t>(1, nc * (w * zoom + gap) - gap), std::max<std::int64_t>(1, nr * (h * zoom + gap) - gap),
              1, 255);
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::int64_t r = 0; r < nr; ++r)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(rows[static_cast<std::size_t>(r)].size()); ++c) {
            const auto& f = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (static_cast<std::int64_t>(f.size()) != h * w) throw std::invalid_argument("frame_grid: frame size");
            for (std::int64_t y = 0; y < h * zoom; ++y)
                for (std::int64_t x = 0; x < w * zoom; ++x) {
                    const double v = (f[static_cast<std::size_t>((y / zoom) * w + x / zoom)] - lo) / span;
                    *img.at(c * (w * zoom + gap) + x, r * (h * zoom + gap) + y) =
                        static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
                }
        }
    return img;
}

}  // namespace pastnet::cli
