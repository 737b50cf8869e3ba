// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>

#include "manifest.hpp"
#include "pastnet/error.hpp"

namespace pastnet::cli {

namespace {

using json = nlohmann::json;

template <class F>
void bounce_fields(datagen::BounceConfig& c, F&& f) {
    f("bounce_frames", c.frames);
    f("bounce_height", c.height);
    f("bounce_width", c.width);
    f("bounce_n_glyphs", c.n_glyphs);
    f("bounce_glyph_scale", c.glyph_scale);
    f("bounce_min_speed", c.min_speed);
    f("bounce_max_speed", c.max_speed);
}

template <class F>
void nse_fields(datagen::NseConfig& c, F&& f) {
    f("nse_grid", c.grid);
    f("nse_viscosity", c.viscosity);
    f("nse_forcing_amplitude", c.forcing_amplitude);
    f("nse_forcing_wavenumber", c.forcing_wavenumber);
    f("nse_init_alpha", c.init_alpha);
    f("nse_init_tau", c.init_tau);
    f("nse_dt_solver", c.dt_solver);
    f("nse_dt_record", c.dt_record);
    f("nse_records", c.records);
    f("nse_probe_stability", c.probe_stability);
}

template <class F>
void swe_fields(datagen::SweConfig& c, F&& f) {
    f("swe_grid", c.grid);
    f("swe_extent", c.extent);
    f("swe_gravity", c.gravity);
    f("swe_radius_min", c.radius_min);
    f("swe_radius_max", c.radius_max);
    f("swe_h_inner", c.h_inner);
    f("swe_h_outer", c.h_outer);
    f("swe_cfl", c.cfl);
    f("swe_dt_record", c.dt_record);
    f("swe_records", c.records);
}

template <class F>
void path_fields(RunConfig& c, F&& f) {
    f("train_data", c.train_data);
    f("work_dir", c.work_dir);
    f("vq_checkpoint", c.vq_checkpoint);
    f("checkpoint", c.checkpoint);
}

template <class F>
void generator_fields(RunConfig& c, F&& f) {
    bounce_fields(c.bounce, f);
    nse_fields(c.nse, f);
    swe_fields(c.swe, f);
    path_fields(c, f);
}

const std::map<std::string, std::string>& descriptions() {
    static const std::map<std::string, std::string> d{
        {"seq_in", "Input frames per window (T)."},
        {"seq_out", "Predicted frames per window (T_f)."},
        {"channels", "Channels per frame (C)."},
        {"height", "Frame height (H); divisible by patch_h and by 4."},
        {"width", "Frame width (W); divisible by patch_w and by 4."},
        {"window_stride", "Frames between consecutive training windows; 0 means seq_in + seq_out."},
        {"patch_h", "Patch height of the spectral branch tokenizer."},
        {"patch_w", "Patch width of the spectral branch tokenizer."},
        {"embed_dim", "Token width of the spectral branch."},
        {"fpg_layers", "Number of spectral filter layers."},
        {"enc_hidden", "Channel width inside the encoder and decoders."},
        {"enc_conv_blocks", "Encoder conv blocks; the last two have stride 2."},
        {"enc_res_blocks", "Encoder residual blocks."},
        {"prop_blocks", "Bottleneck plus group-conv blocks in the propagator."},
        {"prop_groups", "Group count of the propagator's 3x3 convolutions."},
        {"prop_width_mult", "Propagator hidden width as a multiple of the latent width D."},
        {"dec_res_blocks", "Decoder residual blocks."},
        {"dec_deconv_blocks", "Stride-2 transposed convolutions in the decoder; must be 2."},
        {"c_max", "Encoder output width before the dimension estimate."},
        {"latent_dim", "Latent width D; 0 estimates it after phase 0."},
        {"lb_neighbors", "Neighbors R of the intrinsic-dimension estimator."},
        {"lb_sample", "Feature vectors J sampled for the estimate."},
        {"beta", "Weight of the codebook term of the quantizer loss."},
        {"lr", "Adam learning rate for every phase."},
        {"batch_size", "Windows per optimizer step."},
        {"epochs_phase0", "Epochs of plain autoencoder training."},
        {"epochs_phase1", "Epochs of quantized autoencoder training."},
        {"epochs_phase2", "Epochs of full-model training."},
        {"checkpoint_every", "Phase-2 steps between checkpoints; 0 writes only at the end."},
        {"seed", "Seed for initialization and batch order."},
        {"bounce_frames", "Frames per generated bouncing-glyph sequence."},
        {"bounce_height", "Bouncing-glyph frame height."},
        {"bounce_width", "Bouncing-glyph frame width."},
        {"bounce_n_glyphs", "Glyphs per sequence."},
        {"bounce_glyph_scale", "Integer upscale of the 5x7 glyph bitmaps."},
        {"bounce_min_speed", "Minimum glyph speed in pixels per frame."},
        {"bounce_max_speed", "Maximum glyph speed in pixels per frame."},
        {"nse_grid", "Navier-Stokes grid size n (n x n, even)."},
        {"nse_viscosity", "Kinematic viscosity."},
        {"nse_forcing_amplitude", "Amplitude A of f = A (sin 2pi k(x+y) + cos 2pi k(x+y))."},
        {"nse_forcing_wavenumber", "Wavenumber k of the forcing."},
        {"nse_init_alpha", "Decay exponent of the initial vorticity spectrum."},
        {"nse_init_tau", "Inverse length scale of the initial vorticity spectrum."},
        {"nse_dt_solver", "Solver time step."},
        {"nse_dt_record", "Time between recorded frames."},
        {"nse_records", "Recorded frames per trajectory, the first at t = 0."},
        {"nse_probe_stability", "Compare one record interval against half steps before generating."},
        {"swe_grid", "Shallow-water grid size n (n x n cells)."},
        {"swe_extent", "Half width of the square domain."},
        {"swe_gravity", "Gravitational acceleration."},
        {"swe_radius_min", "Smallest dam radius drawn per trajectory."},
        {"swe_radius_max", "Largest dam radius drawn per trajectory."},
        {"swe_h_inner", "Water height inside the dam."},
        {"swe_h_outer", "Water height outside the dam."},
        {"swe_cfl", "CFL number, at most 0.5."},
        {"swe_dt_record", "Time between recorded frames."},
        {"swe_records", "Recorded frames per trajectory, the first at t = 0."},
        {"train_data", "Training dataset (.pstj) for pretrain-vq and train."},
        {"work_dir", "Directory for checkpoints and logs; empty uses $PASTNET_OUT_DIR or ./pastnet-out."},
        {"vq_checkpoint", "Quantized autoencoder checkpoint; empty uses <work_dir>/vqvae.ckpt."},
        {"checkpoint", "Full model checkpoint; empty uses <work_dir>/model.ckpt."},
    };
    return d;
}

// Reads j[key] into v when present, recording a type error otherwise.
struct Reader {
    const json& j;
    std::vector<std::string>& errs;

    template <class T>
    void operator()(const char* key, T& v) const {
        auto it = j.find(key);
        if (it == j.end()) return;
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) return errs.push_back(std::string(key) + ": expected true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) return errs.push_back(std::string(key) + ": expected a string");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) return errs.push_back(std::string(key) + ": expected a number");
        } else {
            if (!it->is_number_integer()) return errs.push_back(std::string(key) + ": expected an integer");
        }
        v = it->get<T>();
    }
};

std::string prefixed(const std::string& prefix, const std::string& msg) {
    return msg.rfind(prefix, 0) == 0 ? msg : prefix + msg;
}

const char* json_type(const json& v) {
    if (v.is_boolean()) return "boolean";
    if (v.is_string()) return "string";
    if (v.is_number_float()) return "number";
    return "integer";
}

}  // namespace

std::filesystem::path default_out_dir() {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("pastnet-out");
}

std::filesystem::path RunConfig::work_path() const { return work_dir.empty() ? default_out_dir() : std::filesystem::path(work_dir); }
std::filesystem::path RunConfig::vq_path() const {
    return vq_checkpoint.empty() ? work_path() / "vqvae.ckpt" : std::filesystem::path(vq_checkpoint);
}
std::filesystem::path RunConfig::checkpoint_path() const {
    return checkpoint.empty() ? work_path() / "model.ckpt" : std::filesystem::path(checkpoint);
}

std::vector<std::string> RunConfig::validate() const {
    auto errs = model.validate();
    for (const auto& e : bounce.validate()) errs.push_back(prefixed("bounce_", e));
    for (const auto& e : nse.validate()) errs.push_back(prefixed("nse_", e));
    for (const auto& e : swe.validate()) errs.push_back(prefixed("swe_", e));
    return errs;
}

json RunConfig::to_json() const {
    json j = model.to_json();
    auto copy = *this;
    generator_fields(copy, [&](const char* key, const auto& v) { j[key] = v; });
    return j;
}

ParsedConfig parse_config(const json& j) {
    ParsedConfig out;
    if (!j.is_object()) {
        out.errors.push_back("config: expected a JSON object");
        return out;
    }
    const json model_defaults = ModelConfig{}.to_json();
    json model_part = json::object();
    std::vector<std::string> known;
    generator_fields(out.config, [&](const char* key, auto&) { known.emplace_back(key); });

    for (const auto& [key, value] : j.items()) {
        if (auto d = model_defaults.find(key); d != model_defaults.end()) {
            const bool ok = d->is_number_float()      ? value.is_number()
                            : d->is_number_unsigned() ? value.is_number_unsigned()
                                                      : value.is_number_integer();
            if (!ok)
                out.errors.push_back(key + ": expected " +
                                     (d->is_number_float()      ? "a number"
                                      : d->is_number_unsigned() ? "a non-negative integer"
                                                                : "an integer"));
            else
                model_part[key] = value;
        } else if (std::find(known.begin(), known.end(), key) == known.end()) {
            out.errors.push_back(key + ": unknown key");
        }
    }
    out.config.model = ModelConfig::from_json(model_part);
    generator_fields(out.config, Reader{j, out.errors});
    for (auto& e : out.config.validate()) out.errors.push_back(std::move(e));
    return out;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    auto parsed = parse_config(j);
    if (!parsed.errors.empty()) {
        std::string msg = "invalid config " + path.string() + ":";
        for (const auto& e : parsed.errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return parsed.config;
}

json config_schema() {
    json props = json::object();
    const json defaults = RunConfig{}.to_json();
    for (const auto& [key, value] : defaults.items()) {
        auto it = descriptions().find(key);
        props[key] = {{"type", json_type(value)},
                      {"default", value},
                      {"description", it == descriptions().end() ? "" : it->second}};
        if (key == "seed") props[key]["minimum"] = 0;
    }
    return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
            {"title", "PastNet run configuration"},
            {"type", "object"},
            {"additionalProperties", false},
            {"properties", props}};
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(cfg.to_json().dump()); }

}  // namespace pastnet::cli
