// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "pastnet/fpg.hpp"

#include <cmath>

#include "pastnet/error.hpp"

namespace pastnet::fpg {

namespace {

void require_rank(const torch::Tensor& t, std::int64_t min_rank, const char* what) {
    if (t.dim() < min_rank)
        throw ShapeError(std::string(what) + ": expected at least " + std::to_string(min_rank) + " dims, got " +
                         std::to_string(t.dim()));
}

}  // namespace

PatchSpec PatchSpec::make(std::int64_t height, std::int64_t width, std::int64_t patch_h, std::int64_t patch_w,
                          std::int64_t embed_dim) {
    if (patch_h < 1 || height % patch_h != 0)
        throw ConfigError("patch_h=" + std::to_string(patch_h) + " does not divide height=" + std::to_string(height));
    if (patch_w < 1 || width % patch_w != 0)
        throw ConfigError("patch_w=" + std::to_string(patch_w) + " does not divide width=" + std::to_string(width));
    if (embed_dim < 1) throw ConfigError("embed_dim must be >= 1");
    return {patch_h, patch_w, embed_dim, height / patch_h, width / patch_w};
}

SpectralGrid spectral_forward(const torch::Tensor& tokens) {
    require_rank(tokens, 3, "spectral_forward");
    const auto spec = torch::fft::rfft2(tokens, c10::nullopt, {-3, -2});
    return {torch::real(spec), torch::imag(spec)};
}

torch::Tensor spectral_inverse(const SpectralGrid& spec, std::int64_t grid_w) {
    require_rank(spec.real, 3, "spectral_inverse");
    const auto grid_h = spec.real.size(-3);
    return torch::fft::irfft2(torch::complex(spec.real, spec.imag), std::vector<std::int64_t>{grid_h, grid_w},
                              {-3, -2});
}

ChannelMlpImpl::ChannelMlpImpl(std::int64_t width, bool hidden)
    : fc1(register_module("fc1", torch::nn::Linear(width, width))) {
    if (hidden) fc2 = register_module("fc2", torch::nn::Linear(width, width));
}

torch::Tensor ChannelMlpImpl::forward(const torch::Tensor& x) {
    if (!fc2) return fc1(x);
    return fc2(torch::gelu(fc1(x)));
}

FpgImpl::FpgImpl(const FpgOptions& opt) : opt_(opt) {
    const auto& p = opt.patch;
    if (p.grid_h * p.patch_h != opt.height || p.grid_w * p.patch_w != opt.width)
        throw ConfigError("patch spec does not tile the " + std::to_string(opt.height) + "x" +
                          std::to_string(opt.width) + " frame");
    if (opt.layers < 0) throw ConfigError("fpg_layers must be >= 0");
    const auto d = p.embed_dim;

    patch_proj = register_module(
        "patch_proj",
        torch::nn::Conv2d(torch::nn::Conv2dOptions(opt.channels, d, {p.patch_h, p.patch_w}).stride({p.patch_h, p.patch_w})));
    pos_embed = register_parameter("pos_embed", torch::randn({p.grid_h, p.grid_w, d}) * 0.02);
    real_mixers = register_module("real_mixers", torch::nn::ModuleList());
    imag_mixers = register_module("imag_mixers", torch::nn::ModuleList());
    for (std::int64_t l = 0; l < opt.layers; ++l) {
        real_mixers->push_back(ChannelMlp(d, opt.mixer_hidden));
        imag_mixers->push_back(ChannelMlp(d, opt.mixer_hidden));
    }
    extract_mlp = register_module("extract_mlp", ChannelMlp(d));
    extract_conv = register_module("extract_conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(d, d, 3).padding(1)));
    unpatch = register_module("unpatch", torch::nn::Linear(d, p.patch_h * p.patch_w * opt.channels));

    const double bound = 1.0 / std::sqrt(static_cast<double>(opt.seq_in));
    time_weight = register_parameter("time_weight", torch::empty({opt.seq_out, opt.seq_in}).uniform_(-bound, bound));
}

torch::Tensor FpgImpl::patchify(const torch::Tensor& video) {
    require_rank(video, 4, "patchify");
    const auto& p = opt_.patch;
    const auto C = video.size(-3), H = video.size(-2), W = video.size(-1);
    if (C != opt_.channels) throw ShapeError("patchify: expected " + std::to_string(opt_.channels) + " channels");
    if (H % p.patch_h != 0) throw ConfigError("patch_h=" + std::to_string(p.patch_h) + " does not divide H=" + std::to_string(H));
    if (W % p.patch_w != 0) throw ConfigError("patch_w=" + std::to_string(p.patch_w) + " does not divide W=" + std::to_string(W));
    if (H != opt_.height || W != opt_.width) throw ShapeError("patchify: frame size differs from configuration");

    auto lead = video.sizes().vec();
    lead.resize(lead.size() - 3);
    auto flat = video.reshape({-1, C, H, W});
    auto tokens = patch_proj(flat).permute({0, 2, 3, 1});  // (F, gh, gw, d)
    tokens = tokens + pos_embed;
    auto out_shape = lead;
    out_shape.insert(out_shape.end(), {p.grid_h, p.grid_w, p.embed_dim});
    return tokens.reshape(out_shape);
}

SpectralGrid FpgImpl::mix_modes(const SpectralGrid& spec, std::int64_t layer) {
    if (layer < 0 || layer >= opt_.layers) throw ConfigError("mix_modes: layer index out of range");
    auto re = real_mixers[static_cast<std::size_t>(layer)]->as<ChannelMlpImpl>()->forward(spec.real);
    auto im = imag_mixers[static_cast<std::size_t>(layer)]->as<ChannelMlpImpl>()->forward(spec.imag);
    return {re, im};
}

torch::Tensor FpgImpl::filter_layer(const torch::Tensor& tokens, std::int64_t layer) {
    return spectral_inverse(mix_modes(spectral_forward(tokens), layer), opt_.patch.grid_w);
}

torch::Tensor FpgImpl::spatial_features(const torch::Tensor& tokens) {
    require_rank(tokens, 3, "spatial_extract");
    const auto& p = opt_.patch;
    auto lead = tokens.sizes().vec();
    auto y = extract_mlp(tokens) + tokens;
    y = y.reshape({-1, p.grid_h, p.grid_w, p.embed_dim}).permute({0, 3, 1, 2});
    y = extract_conv(y).permute({0, 2, 3, 1});
    return y.reshape(lead);
}

torch::Tensor FpgImpl::spatial_extract(const torch::Tensor& tokens) { return torch::tanh(spatial_features(tokens)); }

torch::Tensor FpgImpl::depatchify(const torch::Tensor& tokens) {
    const auto& p = opt_.patch;
    auto lead = tokens.sizes().vec();
    lead.resize(lead.size() - 3);
    auto x = unpatch(tokens);  // (F.., gh, gw, C*ph*pw), feature order (c, py, px)
    x = x.reshape({-1, p.grid_h, p.grid_w, opt_.channels, p.patch_h, p.patch_w});
    x = x.permute({0, 3, 1, 4, 2, 5}).reshape({-1, opt_.channels, opt_.height, opt_.width});
    auto out_shape = lead;
    out_shape.insert(out_shape.end(), {opt_.channels, opt_.height, opt_.width});
    return x.reshape(out_shape);
}

torch::Tensor FpgImpl::temporal_head(const torch::Tensor& frames) {
    require_rank(frames, 4, "temporal_head");
    if (frames.size(-4) != opt_.seq_in) throw ShapeError("temporal_head: expected " + std::to_string(opt_.seq_in) + " frames");
    // out[..., f, c, h, w] = sum_t W[f, t] x[..., t, c, h, w]
    auto x = frames.movedim(-4, -1);          // (..., C, H, W, T)
    auto y = torch::matmul(x, time_weight.t());  // (..., C, H, W, T_f)
    return y.movedim(-1, -4);
}

torch::Tensor FpgImpl::forward(const torch::Tensor& video) {
    auto tokens = patchify(video);
    for (std::int64_t l = 0; l < opt_.layers; ++l) tokens = filter_layer(tokens, l);
    tokens = spatial_extract(tokens);
    return temporal_head(depatchify(tokens));
}

}  // namespace pastnet::fpg
