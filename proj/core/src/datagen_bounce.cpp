// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "pastnet/datagen.hpp"
#include "pastnet/error.hpp"

namespace pastnet::datagen {

namespace {

// 5x7 bitmap digits, one byte per row, bit 4 is the leftmost column.
constexpr std::array<std::array<std::uint8_t, 7>, 10> kFont = {{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
}};

constexpr std::int64_t kFontCols = 5;
constexpr std::int64_t kFontRows = 7;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

std::vector<std::string> BounceConfig::validate() const {
    std::vector<std::string> errs;
    if (frames < 1) errs.push_back("frames: must be >= 1");
    if (height < 1 || width < 1) errs.push_back("height/width: must be >= 1");
    if (n_glyphs < 1) errs.push_back("n_glyphs: must be >= 1");
    if (glyph_scale < 1) errs.push_back("glyph_scale: must be >= 1");
    if (kFontRows * glyph_scale > height || kFontCols * glyph_scale > width)
        errs.push_back("glyph_scale: sprite " + std::to_string(kFontRows * glyph_scale) + "x" +
                       std::to_string(kFontCols * glyph_scale) + " larger than frame " + std::to_string(height) +
                       "x" + std::to_string(width));
    if (!(min_speed >= 0.0) || !(max_speed >= min_speed)) errs.push_back("speed: need 0 <= min_speed <= max_speed");
    return errs;
}

nlohmann::json BounceConfig::to_json() const {
    return {{"frames", frames},       {"height", height},         {"width", width},
            {"n_glyphs", n_glyphs},   {"glyph_scale", glyph_scale}, {"min_speed", min_speed},
            {"max_speed", max_speed}};
}

void BounceAxis::advance() {
    if (limit <= 0.0) {
        position = 0.0;
        return;
    }
    position += velocity;
    while (position < 0.0 || position > limit) {
        position = position < 0.0 ? -position : 2.0 * limit - position;
        velocity = -velocity;
    }
}

Sprite glyph_sprite(int glyph, std::int64_t scale) {
    const auto& rows = kFont.at(static_cast<std::size_t>(glyph));
    Sprite s{kFontRows * scale, kFontCols * scale, {}};
    s.pixels.assign(static_cast<std::size_t>(s.rows * s.cols), 0.0f);
    for (std::int64_t r = 0; r < s.rows; ++r) {
        const auto bits = rows[static_cast<std::size_t>(r / scale)];
        for (std::int64_t c = 0; c < s.cols; ++c) {
            if ((bits >> (kFontCols - 1 - c / scale)) & 1u) s.pixels[static_cast<std::size_t>(r * s.cols + c)] = 1.0f;
        }
    }
    return s;
}

void render_glyphs(const std::vector<GlyphTrack>& tracks, std::int64_t scale, std::span<float> frame,
                   std::int64_t height, std::int64_t width) {
    std::fill(frame.begin(), frame.end(), 0.0f);
    for (const auto& tr : tracks) {
        const Sprite s = glyph_sprite(tr.glyph, scale);
        const auto top = std::clamp<std::int64_t>(std::lround(tr.y.position), 0, height - s.rows);
        const auto left = std::clamp<std::int64_t>(std::lround(tr.x.position), 0, width - s.cols);
        for (std::int64_t r = 0; r < s.rows; ++r) {
            for (std::int64_t c = 0; c < s.cols; ++c) {
                auto& px = frame[static_cast<std::size_t>((top + r) * width + left + c)];
                px = std::max(px, s.pixels[static_cast<std::size_t>(r * s.cols + c)]);
            }
        }
    }
}

std::vector<float> animate(std::vector<GlyphTrack> tracks, const BounceConfig& cfg) {
    const auto frame_size = cfg.height * cfg.width;
    std::vector<float> out(static_cast<std::size_t>(cfg.frames * frame_size));
    for (std::int64_t t = 0; t < cfg.frames; ++t) {
        if (t > 0) {
            for (auto& tr : tracks) {
                tr.x.advance();
                tr.y.advance();
            }
        }
        render_glyphs(tracks, cfg.glyph_scale,
                      std::span<float>(out).subspan(static_cast<std::size_t>(t * frame_size),
                                                    static_cast<std::size_t>(frame_size)),
                      cfg.height, cfg.width);
    }
    return out;
}

TrajectoryDataset gen_bouncing(std::int64_t n_seqs, const BounceConfig& cfg, std::uint64_t seed) {
    if (auto errs = cfg.validate(); !errs.empty()) throw ConfigError("bounce config: " + errs.front());
    if (n_seqs < 1) throw ConfigError("bounce: n_seqs must be >= 1");

    TrajectoryDataset ds;
    ds.generator = "bounce";
    ds.params = cfg.to_json();
    ds.seed = seed;
    ds.dt_record = 1.0;
    ds.resize({n_seqs, cfg.frames, 1, cfg.height, cfg.width});

    const double limit_x = static_cast<double>(cfg.width - kFontCols * cfg.glyph_scale);
    const double limit_y = static_cast<double>(cfg.height - kFontRows * cfg.glyph_scale);
    for (std::int64_t n = 0; n < n_seqs; ++n) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
        std::uniform_int_distribution<int> pick_glyph(0, 9);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<GlyphTrack> tracks;
        for (std::int64_t g = 0; g < cfg.n_glyphs; ++g) {
            const int glyph = pick_glyph(rng);
            const double x0 = unit(rng) * limit_x;
            const double y0 = unit(rng) * limit_y;
            const double angle = unit(rng) * 2.0 * std::numbers::pi;
            const double speed = cfg.min_speed + unit(rng) * (cfg.max_speed - cfg.min_speed);
            tracks.push_back({glyph, {x0, speed * std::cos(angle), limit_x}, {y0, speed * std::sin(angle), limit_y}});
        }
        const auto frames = animate(std::move(tracks), cfg);
        std::copy(frames.begin(), frames.end(), ds.frames(n, 0, cfg.frames).begin());
    }
    return ds;
}

}  // namespace pastnet::datagen
