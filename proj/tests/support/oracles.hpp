// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations shared by unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <torch/torch.h>

#include "pastnet/model.hpp"

namespace pastnet::testing {

/// Direct O(n^2) forward DFT of a (gh, gw, d) grid over its first two axes,
/// half spectrum (gh, gw/2+1, d), double precision.
inline std::pair<torch::Tensor, torch::Tensor> direct_rdft2(const torch::Tensor& grid) {
    const auto g = grid.to(torch::kDouble).contiguous();
    const auto gh = g.size(0), gw = g.size(1), d = g.size(2);
    const auto hw = gw / 2 + 1;
    auto re = torch::zeros({gh, hw, d}, torch::kDouble), im = torch::zeros({gh, hw, d}, torch::kDouble);
    auto ga = g.accessor<double, 3>();
    auto ra = re.accessor<double, 3>(), ia = im.accessor<double, 3>();
    for (std::int64_t u = 0; u < gh; ++u)
        for (std::int64_t v = 0; v < hw; ++v)
            for (std::int64_t c = 0; c < d; ++c) {
                std::complex<double> s = 0;
                for (std::int64_t x = 0; x < gh; ++x)
                    for (std::int64_t y = 0; y < gw; ++y)
                        s += ga[x][y][c] * std::polar(1.0, -2.0 * std::numbers::pi *
                                                               (static_cast<double>(u * x) / gh +
                                                                static_cast<double>(v * y) / gw));
                ra[u][v][c] = s.real();
                ia[u][v][c] = s.imag();
            }
    return {re, im};
}

/// Direct inverse of a half spectrum, Hermitian-extending the missing columns.
inline torch::Tensor direct_irdft2(const torch::Tensor& re, const torch::Tensor& im, std::int64_t gw) {
    const auto gh = re.size(0), d = re.size(2), hw = re.size(1);
    auto r = re.to(torch::kDouble).contiguous(), i = im.to(torch::kDouble).contiguous();
    auto ra = r.accessor<double, 3>(), ia = i.accessor<double, 3>();
    auto coeff = [&](std::int64_t u, std::int64_t v, std::int64_t c) {
        if (v < hw) return std::complex<double>(ra[u][v][c], ia[u][v][c]);
        const auto uu = (gh - u) % gh, vv = gw - v;
        return std::conj(std::complex<double>(ra[uu][vv][c], ia[uu][vv][c]));
    };
    auto out = torch::zeros({gh, gw, d}, torch::kDouble);
    auto oa = out.accessor<double, 3>();
    for (std::int64_t x = 0; x < gh; ++x)
        for (std::int64_t y = 0; y < gw; ++y)
            for (std::int64_t c = 0; c < d; ++c) {
                std::complex<double> s = 0;
                for (std::int64_t u = 0; u < gh; ++u)
                    for (std::int64_t v = 0; v < gw; ++v)
                        s += coeff(u, v, c) * std::polar(1.0, 2.0 * std::numbers::pi *
                                                                  (static_cast<double>(u * x) / gh +
                                                                   static_cast<double>(v * y) / gw));
                oa[x][y][c] = s.real() / static_cast<double>(gh * gw);
            }
    return out;
}

/// Exhaustive nearest codeword, lowest index on ties, double precision.
inline std::vector<std::int64_t> brute_force_nearest(const torch::Tensor& rows, const torch::Tensor& table) {
    const auto r = rows.to(torch::kDouble).contiguous(), t = table.to(torch::kDouble).contiguous();
    auto ra = r.accessor<double, 2>(), ta = t.accessor<double, 2>();
    std::vector<std::int64_t> out;
    for (std::int64_t i = 0; i < r.size(0); ++i) {
        std::int64_t best = -1;
        double best_d = 0;
        for (std::int64_t k = 0; k < t.size(0); ++k) {
            double d = 0;
            for (std::int64_t j = 0; j < r.size(1); ++j) d += (ra[i][j] - ta[k][j]) * (ra[i][j] - ta[k][j]);
            if (best < 0 || d < best_d) {
                best = k;
                best_d = d;
            }
        }
        out.push_back(best);
    }
    return out;
}

struct GradSample {
    std::string param;
    std::int64_t index;
    double analytic;
    double numeric;
    double rel_error;
};

/// Central finite differences on `count` entries drawn from `params`,
/// preferring entries whose analytic gradient magnitude exceeds `min_grad`.
inline std::vector<GradSample> gradcheck(const std::vector<std::pair<std::string, torch::Tensor>>& params,
                                         const std::function<torch::Tensor()>& loss_fn, std::int64_t count,
                                         std::uint64_t seed, double h = 1e-5, double min_grad = 1e-4) {
    for (const auto& [_, p] : params)
        if (p.grad().defined()) p.grad().zero_();
    loss_fn().backward();
    struct Cand {
        std::size_t p;
        std::int64_t i;
        double g;
    };
    std::vector<Cand> strong, weak;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto& p = params[k].second;
        if (!p.grad().defined()) continue;
        const auto g = p.grad().flatten();
        for (std::int64_t i = 0; i < g.numel(); ++i) {
            const double v = g[i].item<double>();
            (std::abs(v) > min_grad ? strong : weak).push_back({k, i, v});
        }
    }
    std::mt19937_64 rng(seed);
    std::shuffle(strong.begin(), strong.end(), rng);
    std::shuffle(weak.begin(), weak.end(), rng);
    strong.insert(strong.end(), weak.begin(), weak.end());
    if (static_cast<std::int64_t>(strong.size()) > count) strong.resize(static_cast<std::size_t>(count));

    std::vector<GradSample> out;
    torch::NoGradGuard ng;
    for (const auto& c : strong) {
        auto flat = params[c.p].second.view(-1);
        const double orig = flat[c.i].item<double>();
        flat[c.i].fill_(orig + h);
        const double up = loss_fn().item<double>();
        flat[c.i].fill_(orig - h);
        const double down = loss_fn().item<double>();
        flat[c.i].fill_(orig);
        const double num = (up - down) / (2 * h);
        const double denom = std::max({std::abs(c.g), std::abs(num), 1e-12});
        out.push_back({params[c.p].first, c.i, c.g, num, std::abs(c.g - num) / denom});
    }
    return out;
}

/// Small model: 16x16 frames, 2 -> 2 frames, every width <= 8.
inline ModelConfig tiny_config() {
    ModelConfig c;
    c.seq_in = 2;
    c.seq_out = 2;
    c.channels = 1;
    c.height = 16;
    c.width = 16;
    c.patch_h = 4;
    c.patch_w = 4;
    c.embed_dim = 4;
    c.fpg_layers = 2;
    c.enc_hidden = 4;
    c.enc_res_blocks = 1;
    c.dec_res_blocks = 1;
    c.prop_blocks = 1;
    c.prop_groups = 2;
    c.prop_width_mult = 2;
    c.c_max = 8;
    c.lb_neighbors = 5;
    c.lb_sample = 200;
    c.batch_size = 2;
    return c;
}

}  // namespace pastnet::testing
