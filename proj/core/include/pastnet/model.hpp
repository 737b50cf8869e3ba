// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Full model: spectral branch + discrete branch, outputs summed element-wise.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "pastnet/dst.hpp"
#include "pastnet/fpg.hpp"

namespace pastnet {

struct ModelConfig {
    // shapes
    std::int64_t seq_in = 10;   // T
    std::int64_t seq_out = 10;  // T_f
    std::int64_t channels = 1;
    std::int64_t height = 64;
    std::int64_t width = 64;
    std::int64_t window_stride = 0;  // between training windows; 0 = T + T_f

    // spectral branch
    std::int64_t patch_h = 8;
    std::int64_t patch_w = 8;
    std::int64_t embed_dim = 128;
    std::int64_t fpg_layers = 8;  // L

    // discrete branch
    std::int64_t enc_hidden = 32;
    std::int64_t enc_conv_blocks = 3;  // K_e
    std::int64_t enc_res_blocks = 3;
    std::int64_t prop_blocks = 4;  // K_t
    std::int64_t prop_groups = 8;
    std::int64_t prop_width_mult = 4;
    std::int64_t dec_res_blocks = 4;
    std::int64_t dec_deconv_blocks = 2;  // K_d
    std::int64_t c_max = 64;
    std::int64_t latent_dim = 0;  // D; 0 = estimate in phase 0
    std::int64_t lb_neighbors = 20;   // R
    std::int64_t lb_sample = 10000;   // J
    double beta = 0.25;

    // optimization
    double lr = 1e-3;
    std::int64_t batch_size = 4;
    std::int64_t epochs_phase0 = 5;
    std::int64_t epochs_phase1 = 20;
    std::int64_t epochs_phase2 = 50;
    std::int64_t checkpoint_every = 0;  // phase-2 steps between checkpoints, 0 = end only
    std::uint64_t seed = 0;

    /// Every violated constraint, each naming its field. Empty when valid.
    std::vector<std::string> validate() const;
    /// Throws ConfigError joining all violations.
    void check() const;

    std::int64_t window() const { return seq_in + seq_out; }
    std::int64_t stride() const { return window_stride > 0 ? window_stride : window(); }

    fpg::FpgOptions fpg_options() const;
    dst::DstOptions dst_options(std::int64_t latent) const;

    nlohmann::json to_json() const;
    /// Unknown keys and wrong types throw ConfigError. Missing keys keep defaults.
    static ModelConfig from_json(const nlohmann::json& j);
};

/// Element-wise sum. Throws ShapeError naming both shapes on mismatch.
torch::Tensor fuse(const torch::Tensor& fpg_out, const torch::Tensor& dst_out);

struct PastNetOutput {
    torch::Tensor prediction;
    torch::Tensor fpg;
    dst::DstOutput dst;
};

class PastNetImpl : public torch::nn::Module {
public:
    PastNetImpl(const ModelConfig& cfg, std::int64_t latent);

    PastNetOutput run(const torch::Tensor& video, bool straight_through_grad);
    /// (T, C, H, W) or (B, T, C, H, W) -> matching (T_f, C, H, W) layout.
    torch::Tensor forward(const torch::Tensor& video);

    const ModelConfig& config() const { return cfg_; }
    std::int64_t latent() const { return latent_; }

    fpg::Fpg fpg{nullptr};
    dst::Dst dst{nullptr};

private:
    ModelConfig cfg_;
    std::int64_t latent_;
};
TORCH_MODULE(PastNet);

/// Evaluation-mode forward without autograd. Throws ShapeError when the video
/// does not match the configured (T, C, H, W).
torch::Tensor predict(PastNet& model, const torch::Tensor& video);

}  // namespace pastnet
