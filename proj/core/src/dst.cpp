// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "pastnet/dst.hpp"

#include <limits>

#include "pastnet/error.hpp"

namespace pastnet::dst {

void check_stride(std::int64_t height, std::int64_t width) {
    if (height % 4 != 0) throw ConfigError("height=" + std::to_string(height) + " is not divisible by the encoder stride 4");
    if (width % 4 != 0) throw ConfigError("width=" + std::to_string(width) + " is not divisible by the encoder stride 4");
}

ChannelNormImpl::ChannelNormImpl(std::int64_t channels, double eps) : eps_(eps) {
    weight = register_parameter("weight", torch::ones({channels}));
    bias = register_parameter("bias", torch::zeros({channels}));
}

torch::Tensor ChannelNormImpl::forward(const torch::Tensor& x) {
    const auto mean = x.mean({1}, true);
    const auto var = (x - mean).pow(2).mean({1}, true);
    const auto y = (x - mean) / torch::sqrt(var + eps_);
    return y * weight.view({1, -1, 1, 1}) + bias.view({1, -1, 1, 1});
}

ConvBlockImpl::ConvBlockImpl(std::int64_t in, std::int64_t out, std::int64_t stride)
    : conv(register_module("conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 3).stride(stride).padding(1)))),
      norm(register_module("norm", ChannelNorm(out))) {}

torch::Tensor ConvBlockImpl::forward(const torch::Tensor& x) { return torch::relu(norm(conv(x))); }

ResBlockImpl::ResBlockImpl(std::int64_t channels)
    : conv1(register_module("conv1", torch::nn::Conv2d(torch::nn::Conv2dOptions(channels, channels, 3).padding(1)))),
      norm(register_module("norm", ChannelNorm(channels))),
      conv2(register_module("conv2", torch::nn::Conv2d(torch::nn::Conv2dOptions(channels, channels, 3).padding(1)))) {}

torch::Tensor ResBlockImpl::forward(const torch::Tensor& x) { return x + conv2(torch::relu(norm(conv1(x)))); }

DeconvBlockImpl::DeconvBlockImpl(std::int64_t in, std::int64_t out)
    : deconv(register_module(
          "deconv", torch::nn::ConvTranspose2d(torch::nn::ConvTranspose2dOptions(in, out, 4).stride(2).padding(1)))),
      norm(register_module("norm", ChannelNorm(out))) {}

torch::Tensor DeconvBlockImpl::forward(const torch::Tensor& x) { return torch::relu(norm(deconv(x))); }

EncoderImpl::EncoderImpl(const EncoderOptions& opt) : opt_(opt) {
    if (opt.conv_blocks < 2) throw ConfigError("enc_conv_blocks must be >= 2 (two stride-2 blocks)");
    stem = torch::nn::Sequential();
    for (std::int64_t i = 0; i < opt.conv_blocks; ++i) {
        const auto stride = i >= opt.conv_blocks - 2 ? 2 : 1;
        stem->push_back(ConvBlock(i == 0 ? opt.in_channels : opt.hidden, opt.hidden, stride));
    }
    for (std::int64_t i = 0; i < opt.res_blocks; ++i) stem->push_back(ResBlock(opt.hidden));
    stem = register_module("stem", stem);
    head = register_module("head", torch::nn::Conv2d(torch::nn::Conv2dOptions(opt.hidden, opt.latent, 1)));
}

torch::Tensor EncoderImpl::forward(const torch::Tensor& frames) { return head(stem->forward(frames)); }

void EncoderImpl::rebuild_head(std::int64_t latent) {
    opt_.latent = latent;
    head = replace_module("head", torch::nn::Conv2d(torch::nn::Conv2dOptions(opt_.hidden, latent, 1)));
}

DecoderImpl::DecoderImpl(const DecoderOptions& opt) : opt_(opt) {
    if (opt.deconv_blocks < 1) throw ConfigError("dec_deconv_blocks must be >= 1");
    body = torch::nn::Sequential();
    body->push_back(ConvBlock(opt.latent, opt.hidden, 1));
    for (std::int64_t i = 0; i < opt.res_blocks; ++i) body->push_back(ResBlock(opt.hidden));
    for (std::int64_t i = 0; i + 1 < opt.deconv_blocks; ++i) body->push_back(DeconvBlock(opt.hidden, opt.hidden));
    body = register_module("body", body);
    out = register_module("out", torch::nn::ConvTranspose2d(
                                     torch::nn::ConvTranspose2dOptions(opt.hidden, opt.out_channels, 4).stride(2).padding(1)));
}

torch::Tensor DecoderImpl::forward(const torch::Tensor& latents) { return out(body->forward(latents)); }

MemoryBankImpl::MemoryBankImpl(std::int64_t num_codes, std::int64_t dim) {
    if (num_codes < 1 || dim < 1) throw ConfigError("memory bank needs at least one codeword of dimension >= 1");
    const double bound = 1.0 / static_cast<double>(num_codes);
    codewords = register_parameter("codewords", torch::empty({num_codes, dim}).uniform_(-bound, bound));
}

void MemoryBankImpl::set_frozen(bool frozen) {
    frozen_ = frozen;
    codewords.set_requires_grad(!frozen);
}

std::vector<std::int64_t> nearest_codewords(const torch::Tensor& rows, const torch::Tensor& table) {
    if (rows.dim() != 2 || table.dim() != 2 || rows.size(1) != table.size(1))
        throw ConfigError("quantize: feature dimension " + std::to_string(rows.size(-1)) +
                          " does not match codeword dimension " + std::to_string(table.size(-1)));
    const auto r = rows.detach().to(torch::kDouble).contiguous();
    const auto t = table.detach().to(torch::kDouble).contiguous();
    const auto n = r.size(0), k = t.size(0), d = r.size(1);
    const double* rp = r.data_ptr<double>();
    const double* tp = t.data_ptr<double>();
    std::vector<std::int64_t> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double* z = rp + i * d;
        double best = std::numeric_limits<double>::infinity();
        std::int64_t best_k = 0;
        for (std::int64_t c = 0; c < k; ++c) {
            const double* m = tp + c * d;
            double acc = 0.0;
            for (std::int64_t j = 0; j < d; ++j) {
                const double diff = z[j] - m[j];
                acc += diff * diff;
            }
            if (acc < best) {
                best = acc;
                best_k = c;
            }
        }
        out[static_cast<std::size_t>(i)] = best_k;
    }
    return out;
}

QuantizeResult MemoryBankImpl::quantize(const torch::Tensor& features) const {
    if (features.dim() < 3) throw ShapeError("quantize: expected (..., D, H', W') features");
    if (features.size(-3) != dim())
        throw ConfigError("quantize: feature dimension " + std::to_string(features.size(-3)) +
                          " does not match codeword dimension " + std::to_string(dim()));
    auto cl = features.movedim(-3, -1);  // (..., H', W', D)
    const auto lead = cl.sizes().vec();
    const auto rows = cl.reshape({-1, dim()});
    const auto idx = nearest_codewords(rows, codewords);
    auto index = torch::tensor(idx, torch::kLong);
    auto q = codewords.index_select(0, index).reshape(lead).movedim(-1, -3);
    std::vector<std::int64_t> idx_shape(lead.begin(), lead.end() - 1);
    return {q, index.reshape(idx_shape)};
}

torch::Tensor straight_through(const torch::Tensor& pre_quant, const torch::Tensor& quantized) {
    return pre_quant + (quantized - pre_quant).detach();
}

VqLoss vq_loss(const torch::Tensor& video, const torch::Tensor& recon, const torch::Tensor& pre_quant,
               const torch::Tensor& quantized, double beta) {
    if (beta < 0.0) throw ConfigError("beta must be >= 0, got " + std::to_string(beta));
    if (!video.sizes().equals(recon.sizes())) throw ShapeError("vq_loss: video and reconstruction shapes differ");
    if (!pre_quant.sizes().equals(quantized.sizes())) throw ShapeError("vq_loss: latent shapes differ");
    VqLoss l;
    l.reconstruction = (video - recon).pow(2).sum();
    l.commitment = (quantized.detach() - pre_quant).pow(2).sum();
    l.codebook = beta * (quantized - pre_quant.detach()).pow(2).sum();
    l.total = l.reconstruction + l.commitment + l.codebook;
    return l;
}

std::int64_t PropagatorOptions::hidden() const {
    const auto raw = width_mult * dim;
    return (raw + groups - 1) / groups * groups;
}

PropagatorImpl::PropagatorImpl(const PropagatorOptions& opt) : opt_(opt) {
    if (opt.blocks < 1) throw ConfigError("prop_blocks must be >= 1");
    if (opt.groups < 1) throw ConfigError("prop_groups must be >= 1");
    const auto hidden = opt.hidden();
    bottlenecks = register_module("bottlenecks", torch::nn::ModuleList());
    group_convs = register_module("group_convs", torch::nn::ModuleList());
    for (std::int64_t b = 0; b < opt.blocks; ++b) {
        const auto in = b == 0 ? opt.seq_in * opt.dim : hidden;
        bottlenecks->push_back(torch::nn::Conv2d(torch::nn::Conv2dOptions(in, hidden, 1)));
        group_convs->push_back(torch::nn::Conv2d(torch::nn::Conv2dOptions(hidden, hidden, 3).padding(1).groups(opt.groups)));
    }
    expand = register_module("expand", torch::nn::Conv2d(torch::nn::Conv2dOptions(hidden, opt.seq_out * opt.dim, 1)));
}

torch::Tensor PropagatorImpl::forward(const torch::Tensor& features) {
    if (features.dim() != 5 || features.size(1) != opt_.seq_in || features.size(2) != opt_.dim)
        throw ShapeError("propagate: expected (B, " + std::to_string(opt_.seq_in) + ", " + std::to_string(opt_.dim) +
                         ", H', W') features");
    const auto B = features.size(0), H = features.size(3), W = features.size(4);
    auto x = features.reshape({B, opt_.seq_in * opt_.dim, H, W});
    for (std::size_t b = 0; b < bottlenecks->size(); ++b) {
        x = bottlenecks[b]->as<torch::nn::Conv2dImpl>()->forward(x);
        x = torch::leaky_relu(group_convs[b]->as<torch::nn::Conv2dImpl>()->forward(x), 0.2);
    }
    return expand(x).reshape({B, opt_.seq_out, opt_.dim, H, W});
}

DstImpl::DstImpl(const DstOptions& opt) : opt_(opt) {
    check_stride(opt.height, opt.width);
    encoder = register_module(
        "encoder", Encoder(EncoderOptions{opt.channels, opt.enc_hidden, opt.latent, opt.enc_conv_blocks, opt.enc_res_blocks}));
    bank = register_module("bank", MemoryBank(opt.latent * opt.latent, opt.latent));
    propagator = register_module("propagator", Propagator(PropagatorOptions{opt.seq_in, opt.seq_out, opt.latent,
                                                                            opt.prop_blocks, opt.prop_groups,
                                                                            opt.prop_width_mult}));
    decoder = register_module("decoder", Decoder(DecoderOptions{opt.latent, opt.enc_hidden, opt.channels,
                                                                opt.dec_res_blocks, opt.dec_deconv_blocks}));
}

void DstImpl::set_encoder(Encoder enc) {
    if (enc->options().latent != opt_.latent) throw ConfigError("set_encoder: encoder latent width differs from D");
    encoder = replace_module("encoder", std::move(enc));
}

void DstImpl::set_bank(MemoryBank b) {
    if (b->dim() != opt_.latent) throw ConfigError("set_bank: codeword dimension differs from D");
    bank = replace_module("bank", std::move(b));
}

DstOutput DstImpl::run(const torch::Tensor& video, bool straight_through_grad) {
    const bool batched = video.dim() == 5;
    if (!batched && video.dim() != 4) throw ShapeError("dst: expected (T, C, H, W) or (B, T, C, H, W) input");
    const auto x = batched ? video : video.unsqueeze(0);
    const auto B = x.size(0), T = x.size(1);
    if (T != opt_.seq_in || x.size(2) != opt_.channels || x.size(3) != opt_.height || x.size(4) != opt_.width)
        throw ShapeError("dst: input shape does not match configuration");

    DstOutput out;
    out.pre_quant = encoder(x.reshape({B * T, opt_.channels, opt_.height, opt_.width}));
    auto q = bank->quantize(out.pre_quant);
    out.quantized = q.quantized;
    out.indices = q.indices;
    const auto latent = straight_through_grad ? straight_through(out.pre_quant, q.quantized) : q.quantized;
    const auto h = latent.size(-2), w = latent.size(-1);
    auto z = propagator(latent.reshape({B, T, opt_.latent, h, w}));
    auto frames = decoder(z.reshape({B * opt_.seq_out, opt_.latent, h, w}));
    frames = frames.reshape({B, opt_.seq_out, opt_.channels, opt_.height, opt_.width});
    out.prediction = batched ? frames : frames.squeeze(0);
    return out;
}

torch::Tensor DstImpl::forward(const torch::Tensor& video) { return run(video, is_training()).prediction; }

}  // namespace pastnet::dst
