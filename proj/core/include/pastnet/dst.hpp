// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Discrete spatio-temporal branch: conv encoder, memory-bank quantizer,
// grouped temporal propagation and transposed-conv decoder.
//
// Feature maps are channels-first per frame, (frames, channels, H', W'). A
// sequence tensor carries time (and optionally batch) in front.

#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

namespace pastnet::dst {

/// LayerNorm over the channel dimension at every spatial location.
class ChannelNormImpl : public torch::nn::Module {
public:
    explicit ChannelNormImpl(std::int64_t channels, double eps = 1e-5);
    torch::Tensor forward(const torch::Tensor& x);

    torch::Tensor weight;
    torch::Tensor bias;

private:
    double eps_;
};
TORCH_MODULE(ChannelNorm);

/// Conv2d -> ChannelNorm -> ReLU.
class ConvBlockImpl : public torch::nn::Module {
public:
    ConvBlockImpl(std::int64_t in, std::int64_t out, std::int64_t stride);
    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::Conv2d conv{nullptr};
    ChannelNorm norm{nullptr};
};
TORCH_MODULE(ConvBlock);

/// x + Conv(ReLU(Norm(Conv(x)))) at fixed width.
class ResBlockImpl : public torch::nn::Module {
public:
    explicit ResBlockImpl(std::int64_t channels);
    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::Conv2d conv1{nullptr};
    ChannelNorm norm{nullptr};
    torch::nn::Conv2d conv2{nullptr};
};
TORCH_MODULE(ResBlock);

/// ConvTranspose2d(k=4, s=2, p=1) -> ChannelNorm -> ReLU, exact 2x upsample.
class DeconvBlockImpl : public torch::nn::Module {
public:
    DeconvBlockImpl(std::int64_t in, std::int64_t out);
    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::ConvTranspose2d deconv{nullptr};
    ChannelNorm norm{nullptr};
};
TORCH_MODULE(DeconvBlock);

struct EncoderOptions {
    std::int64_t in_channels = 1;
    std::int64_t hidden = 32;
    std::int64_t latent = 64;
    std::int64_t conv_blocks = 3;  // first ones stride 1, last two stride 2
    std::int64_t res_blocks = 3;
};

/// Frames (F, C, H, W) -> latents (F, latent, H/4, W/4). The final 1x1
/// projection sets the latent width and can be rebuilt once D is known.
class EncoderImpl : public torch::nn::Module {
public:
    explicit EncoderImpl(const EncoderOptions& opt);
    torch::Tensor forward(const torch::Tensor& frames);

    /// Replaces the latent projection with a fresh one of width `latent`.
    void rebuild_head(std::int64_t latent);
    const EncoderOptions& options() const { return opt_; }

    torch::nn::Sequential stem{nullptr};
    torch::nn::Conv2d head{nullptr};

private:
    EncoderOptions opt_;
};
TORCH_MODULE(Encoder);

struct DecoderOptions {
    std::int64_t latent = 64;
    std::int64_t hidden = 32;
    std::int64_t out_channels = 1;
    std::int64_t res_blocks = 4;
    std::int64_t deconv_blocks = 2;
};

/// Latents (F, latent, H/4, W/4) -> frames (F, C, H, W): one conv block,
/// residual blocks, then stride-2 transposed convs. The last transposed
/// conv is linear so outputs are signed and not normalized away.
class DecoderImpl : public torch::nn::Module {
public:
    explicit DecoderImpl(const DecoderOptions& opt);
    torch::Tensor forward(const torch::Tensor& latents);

    torch::nn::Sequential body{nullptr};
    torch::nn::ConvTranspose2d out{nullptr};

private:
    DecoderOptions opt_;
};
TORCH_MODULE(Decoder);

struct QuantizeResult {
    torch::Tensor quantized;  // codeword values, gradient flows to the codebook only
    torch::Tensor indices;    // int64, one per spatial vector, shape (F, H', W')
};

/// D^2 codewords of dimension D.
class MemoryBankImpl : public torch::nn::Module {
public:
    /// Codewords uniform in [-1/K, 1/K], K = num_codes.
    MemoryBankImpl(std::int64_t num_codes, std::int64_t dim);

    std::int64_t size() const { return codewords.size(0); }
    std::int64_t dim() const { return codewords.size(1); }

    void set_frozen(bool frozen);
    bool frozen() const { return frozen_; }

    /// Exact nearest codeword by squared Euclidean distance, lowest index on
    /// ties. Input (..., D, H', W') channels-first.
    QuantizeResult quantize(const torch::Tensor& features) const;

    torch::Tensor codewords;

private:
    bool frozen_ = false;
};
TORCH_MODULE(MemoryBank);

/// Row-wise exact nearest neighbor into a (K, D) table, lowest index wins.
std::vector<std::int64_t> nearest_codewords(const torch::Tensor& rows, const torch::Tensor& table);

/// z + sg(q - z): forward value q, gradient passed unchanged to z.
torch::Tensor straight_through(const torch::Tensor& pre_quant, const torch::Tensor& quantized);

struct VqLoss {
    torch::Tensor total;
    torch::Tensor reconstruction;  // ||V - V~||^2
    torch::Tensor commitment;      // ||sg[Zq] - Z||^2, reaches the encoder only
    torch::Tensor codebook;        // beta ||Zq - sg[Z]||^2, reaches the codebook only
};

/// Squared L2 (sums) throughout. Throws ConfigError when beta < 0.
VqLoss vq_loss(const torch::Tensor& video, const torch::Tensor& recon, const torch::Tensor& pre_quant,
               const torch::Tensor& quantized, double beta);

struct PropagatorOptions {
    std::int64_t seq_in = 10;
    std::int64_t seq_out = 10;
    std::int64_t dim = 8;
    std::int64_t blocks = 4;
    std::int64_t groups = 8;
    std::int64_t width_mult = 4;

    /// width_mult * dim rounded up to a multiple of groups.
    std::int64_t hidden() const;
};

/// (B, T, D, H', W') -> (B, T_f, D, H', W'). Time is folded into channels;
/// each block is a 1x1 bottleneck followed by a grouped 3x3 conv.
class PropagatorImpl : public torch::nn::Module {
public:
    explicit PropagatorImpl(const PropagatorOptions& opt);
    torch::Tensor forward(const torch::Tensor& features);

    torch::nn::ModuleList bottlenecks;
    torch::nn::ModuleList group_convs;
    torch::nn::Conv2d expand{nullptr};

private:
    PropagatorOptions opt_;
};
TORCH_MODULE(Propagator);

struct DstOptions {
    std::int64_t seq_in = 10;
    std::int64_t seq_out = 10;
    std::int64_t channels = 1;
    std::int64_t height = 64;
    std::int64_t width = 64;
    std::int64_t enc_hidden = 32;
    std::int64_t enc_conv_blocks = 3;
    std::int64_t enc_res_blocks = 3;
    std::int64_t latent = 8;  // D
    std::int64_t dec_res_blocks = 4;
    std::int64_t dec_deconv_blocks = 2;
    std::int64_t prop_blocks = 4;
    std::int64_t prop_groups = 8;
    std::int64_t prop_width_mult = 4;
};

struct DstOutput {
    torch::Tensor prediction;  // (B, T_f, C, H, W)
    torch::Tensor pre_quant;   // (B*T, D, H', W')
    torch::Tensor quantized;   // codeword values
    torch::Tensor indices;
};

class DstImpl : public torch::nn::Module {
public:
    explicit DstImpl(const DstOptions& opt);

    /// Straight-through quantization when `straight_through_grad` is set,
    /// plain codeword lookup otherwise. Accepts (T, C, H, W) or
    /// (B, T, C, H, W); prediction rank follows the input.
    DstOutput run(const torch::Tensor& video, bool straight_through_grad = true);
    torch::Tensor forward(const torch::Tensor& video);

    /// Re-registers a trained encoder (and its codebook) in this branch.
    void set_encoder(Encoder encoder);
    void set_bank(MemoryBank bank);

    const DstOptions& options() const { return opt_; }

    Encoder encoder{nullptr};
    MemoryBank bank{nullptr};
    Propagator propagator{nullptr};
    Decoder decoder{nullptr};

private:
    DstOptions opt_;
};
TORCH_MODULE(Dst);

/// Throws ConfigError when height/width are not divisible by the encoder's
/// total stride of 4.
void check_stride(std::int64_t height, std::int64_t width);

}  // namespace pastnet::dst
