// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "pastnet/model.hpp"

#include <algorithm>
#include <sstream>
#include <type_traits>

#include "pastnet/error.hpp"

namespace pastnet {

namespace {

std::string shape_str(const torch::Tensor& t) {
    std::ostringstream os;
    os << t.sizes();
    return os.str();
}

// Field list shared by to_json / from_json.
template <class F>
void for_each_field(ModelConfig& c, F&& f) {
    f("seq_in", c.seq_in);
    f("seq_out", c.seq_out);
    f("channels", c.channels);
    f("height", c.height);
    f("width", c.width);
    f("window_stride", c.window_stride);
    f("patch_h", c.patch_h);
    f("patch_w", c.patch_w);
    f("embed_dim", c.embed_dim);
    f("fpg_layers", c.fpg_layers);
    f("enc_hidden", c.enc_hidden);
    f("enc_conv_blocks", c.enc_conv_blocks);
    f("enc_res_blocks", c.enc_res_blocks);
    f("prop_blocks", c.prop_blocks);
    f("prop_groups", c.prop_groups);
    f("prop_width_mult", c.prop_width_mult);
    f("dec_res_blocks", c.dec_res_blocks);
    f("dec_deconv_blocks", c.dec_deconv_blocks);
    f("c_max", c.c_max);
    f("latent_dim", c.latent_dim);
    f("lb_neighbors", c.lb_neighbors);
    f("lb_sample", c.lb_sample);
    f("beta", c.beta);
    f("lr", c.lr);
    f("batch_size", c.batch_size);
    f("epochs_phase0", c.epochs_phase0);
    f("epochs_phase1", c.epochs_phase1);
    f("epochs_phase2", c.epochs_phase2);
    f("checkpoint_every", c.checkpoint_every);
    f("seed", c.seed);
}

}  // namespace

std::vector<std::string> ModelConfig::validate() const {
    std::vector<std::string> errs;
    auto positive = [&](const char* name, std::int64_t v) {
        if (v < 1) errs.push_back(std::string(name) + ": must be >= 1, got " + std::to_string(v));
    };
    auto non_negative = [&](const char* name, std::int64_t v) {
        if (v < 0) errs.push_back(std::string(name) + ": must be >= 0, got " + std::to_string(v));
    };
    positive("seq_in", seq_in);
    positive("seq_out", seq_out);
    positive("channels", channels);
    positive("height", height);
    positive("width", width);
    non_negative("window_stride", window_stride);
    positive("patch_h", patch_h);
    positive("patch_w", patch_w);
    if (patch_h >= 1 && height >= 1 && height % patch_h != 0)
        errs.push_back("patch_h: " + std::to_string(patch_h) + " does not divide height " + std::to_string(height));
    if (patch_w >= 1 && width >= 1 && width % patch_w != 0)
        errs.push_back("patch_w: " + std::to_string(patch_w) + " does not divide width " + std::to_string(width));
    positive("embed_dim", embed_dim);
    non_negative("fpg_layers", fpg_layers);
    positive("enc_hidden", enc_hidden);
    if (enc_conv_blocks < 2) errs.push_back("enc_conv_blocks: must be >= 2 (two stride-2 blocks), got " + std::to_string(enc_conv_blocks));
    non_negative("enc_res_blocks", enc_res_blocks);
    positive("prop_blocks", prop_blocks);
    positive("prop_groups", prop_groups);
    positive("prop_width_mult", prop_width_mult);
    non_negative("dec_res_blocks", dec_res_blocks);
    if (dec_deconv_blocks != 2)
        errs.push_back("dec_deconv_blocks: must be 2 to undo the encoder's stride of 4, got " + std::to_string(dec_deconv_blocks));
    if (height % 4 != 0) errs.push_back("height: " + std::to_string(height) + " is not divisible by the encoder stride 4");
    if (width % 4 != 0) errs.push_back("width: " + std::to_string(width) + " is not divisible by the encoder stride 4");
    positive("c_max", c_max);
    non_negative("latent_dim", latent_dim);
    if (lb_neighbors < 3) errs.push_back("lb_neighbors: must be >= 3, got " + std::to_string(lb_neighbors));
    if (lb_sample < lb_neighbors + 1)
        errs.push_back("lb_sample: must be >= lb_neighbors + 1, got " + std::to_string(lb_sample));
    if (!(beta >= 0.0)) errs.push_back("beta: must be >= 0, got " + std::to_string(beta));
    if (!(lr > 0.0)) errs.push_back("lr: must be > 0, got " + std::to_string(lr));
    positive("batch_size", batch_size);
    non_negative("epochs_phase0", epochs_phase0);
    non_negative("epochs_phase1", epochs_phase1);
    non_negative("epochs_phase2", epochs_phase2);
    non_negative("checkpoint_every", checkpoint_every);
    return errs;
}

void ModelConfig::check() const {
    const auto errs = validate();
    if (errs.empty()) return;
    std::string msg = "invalid model config:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
}

fpg::FpgOptions ModelConfig::fpg_options() const {
    fpg::FpgOptions o;
    o.seq_in = seq_in;
    o.seq_out = seq_out;
    o.channels = channels;
    o.height = height;
    o.width = width;
    o.patch = fpg::PatchSpec::make(height, width, patch_h, patch_w, embed_dim);
    o.layers = fpg_layers;
    return o;
}

dst::DstOptions ModelConfig::dst_options(std::int64_t latent) const {
    dst::DstOptions o;
    o.seq_in = seq_in;
    o.seq_out = seq_out;
    o.channels = channels;
    o.height = height;
    o.width = width;
    o.enc_hidden = enc_hidden;
    o.enc_conv_blocks = enc_conv_blocks;
    o.enc_res_blocks = enc_res_blocks;
    o.latent = latent;
    o.dec_res_blocks = dec_res_blocks;
    o.dec_deconv_blocks = dec_deconv_blocks;
    o.prop_blocks = prop_blocks;
    o.prop_groups = prop_groups;
    o.prop_width_mult = prop_width_mult;
    return o;
}

nlohmann::json ModelConfig::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    auto copy = *this;
    for_each_field(copy, [&](const char* name, auto& v) { j[name] = v; });
    return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("model config must be a JSON object");
    ModelConfig c;
    std::vector<std::string> errs;
    std::vector<std::string> known;
    for_each_field(c, [&](const char* name, auto& v) {
        known.emplace_back(name);
        auto it = j.find(name);
        if (it == j.end()) return;
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) {
                errs.push_back(std::string(name) + ": expected a number");
                return;
            }
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!it->is_number_unsigned()) {
                errs.push_back(std::string(name) + ": expected a non-negative integer");
                return;
            }
        } else {
            if (!it->is_number_integer()) {
                errs.push_back(std::string(name) + ": expected an integer");
                return;
            }
        }
        v = it->get<T>();
    });
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) errs.push_back(key + ": unknown key");
    if (!errs.empty()) {
        std::string msg = "invalid model config:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return c;
}

torch::Tensor fuse(const torch::Tensor& fpg_out, const torch::Tensor& dst_out) {
    if (!fpg_out.sizes().equals(dst_out.sizes()))
        throw ShapeError("fuse: shapes differ, fpg " + shape_str(fpg_out) + " vs dst " + shape_str(dst_out));
    return fpg_out + dst_out;
}

PastNetImpl::PastNetImpl(const ModelConfig& cfg, std::int64_t latent) : cfg_(cfg), latent_(latent) {
    cfg.check();
    if (latent < 1) throw ConfigError("latent_dim: must be >= 1 when building the model, got " + std::to_string(latent));
    fpg = register_module("fpg", fpg::Fpg(cfg.fpg_options()));
    dst = register_module("dst", dst::Dst(cfg.dst_options(latent)));
}

PastNetOutput PastNetImpl::run(const torch::Tensor& video, bool straight_through_grad) {
    PastNetOutput out;
    out.fpg = fpg(video);
    out.dst = dst->run(video, straight_through_grad);
    out.prediction = fuse(out.fpg, out.dst.prediction);
    return out;
}

torch::Tensor PastNetImpl::forward(const torch::Tensor& video) { return run(video, is_training()).prediction; }

torch::Tensor predict(PastNet& model, const torch::Tensor& video) {
    const auto& c = model->config();
    const auto s = video.sizes();
    const bool ok = (video.dim() == 4 || video.dim() == 5) && s[s.size() - 4] == c.seq_in &&
                    s[s.size() - 3] == c.channels && s[s.size() - 2] == c.height && s[s.size() - 1] == c.width;
    if (!ok)
        throw ShapeError("predict: input shape " + shape_str(video) + " does not match configured (T, C, H, W) = (" +
                         std::to_string(c.seq_in) + ", " + std::to_string(c.channels) + ", " + std::to_string(c.height) +
                         ", " + std::to_string(c.width) + ")");
    const bool was_training = model->is_training();
    model->eval();
    torch::NoGradGuard ng;
    auto y = model->run(video, false).prediction;
    model->train(was_training);
    return y;
}

}  // namespace pastnet
