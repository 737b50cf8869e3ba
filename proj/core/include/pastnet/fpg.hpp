// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Fourier-domain branch. Frames are cut into patch tokens, passed through a
// stack of spectral filter layers (rfft2 -> per-mode channel mixing of the
// real and imaginary parts -> irfft2), refined by a residual MLP and a 3x3
// convolution, then projected back to pixels and across time.
//
// Token tensors are channels-last: (..., grid_h, grid_w, d). Any number of
// leading dims (time, or batch and time) is accepted.

#pragma once

#include <cstdint>

#include <torch/torch.h>

namespace pastnet::fpg {

struct PatchSpec {
    std::int64_t patch_h = 8;
    std::int64_t patch_w = 8;
    std::int64_t embed_dim = 128;
    std::int64_t grid_h = 0;
    std::int64_t grid_w = 0;

    /// Throws ConfigError naming patch_h / patch_w when they do not divide
    /// the frame.
    static PatchSpec make(std::int64_t height, std::int64_t width, std::int64_t patch_h, std::int64_t patch_w,
                          std::int64_t embed_dim);

    std::int64_t tokens() const { return grid_h * grid_w; }
    std::int64_t spectral_w() const { return grid_w / 2 + 1; }
};

/// Nonredundant half-spectrum over the token grid, (..., grid_h, grid_w/2+1, d).
struct SpectralGrid {
    torch::Tensor real;
    torch::Tensor imag;
};

/// Unnormalized forward 2D DFT over the grid axes.
SpectralGrid spectral_forward(const torch::Tensor& tokens);

/// 1/(grid_h*grid_w) inverse, Hermitian-extending the stored half.
torch::Tensor spectral_inverse(const SpectralGrid& spec, std::int64_t grid_w);

/// Linear -> GELU -> Linear over the last dimension, hidden width = width.
/// With `hidden` unset it is a single Linear (fc2 stays null).
class ChannelMlpImpl : public torch::nn::Module {
public:
    explicit ChannelMlpImpl(std::int64_t width, bool hidden = true);
    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::Linear fc1{nullptr};
    torch::nn::Linear fc2{nullptr};
};
TORCH_MODULE(ChannelMlp);

struct FpgOptions {
    std::int64_t seq_in = 10;
    std::int64_t seq_out = 10;
    std::int64_t channels = 1;
    std::int64_t height = 64;
    std::int64_t width = 64;
    PatchSpec patch;
    std::int64_t layers = 8;
    bool mixer_hidden = true;  // false: each spectral mixer is one Linear
};

class FpgImpl : public torch::nn::Module {
public:
    explicit FpgImpl(const FpgOptions& opt);

    const FpgOptions& options() const { return opt_; }

    /// (..., T, C, H, W) -> (..., T, grid_h, grid_w, d).
    torch::Tensor patchify(const torch::Tensor& video);
    SpectralGrid mix_modes(const SpectralGrid& spec, std::int64_t layer);
    /// One filter layer: forward transform, mixing, inverse transform.
    torch::Tensor filter_layer(const torch::Tensor& tokens, std::int64_t layer);
    /// Residual MLP + 3x3 conv over the grid, before the tanh.
    torch::Tensor spatial_features(const torch::Tensor& tokens);
    torch::Tensor spatial_extract(const torch::Tensor& tokens);
    /// (..., T, grid_h, grid_w, d) -> (..., T, C, H, W).
    torch::Tensor depatchify(const torch::Tensor& tokens);
    /// (..., T, C, H, W) -> (..., T_f, C, H, W).
    torch::Tensor temporal_head(const torch::Tensor& frames);

    /// Full branch: (T, C, H, W) or (B, T, C, H, W) -> matching (T_f, ...).
    torch::Tensor forward(const torch::Tensor& video);

    torch::nn::Conv2d patch_proj{nullptr};
    torch::Tensor pos_embed;
    torch::nn::ModuleList real_mixers;
    torch::nn::ModuleList imag_mixers;
    ChannelMlp extract_mlp{nullptr};
    torch::nn::Conv2d extract_conv{nullptr};
    torch::nn::Linear unpatch{nullptr};
    torch::Tensor time_weight;  // (T_f, T), no bias

private:
    FpgOptions opt_;
};
TORCH_MODULE(Fpg);

}  // namespace pastnet::fpg
