// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "manifest.hpp"
#include "pastnet/checkpoint.hpp"
#include "pastnet/datagen.hpp"
#include "pastnet/error.hpp"
#include "pastnet/metrics.hpp"
#include "pastnet/training.hpp"
#include "plot.hpp"
#include "run_config.hpp"

namespace pastnet::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Context {
    std::vector<std::string> args;
    std::ostream& out;
    std::ostream& err;

    TrainLog log() const {
        TrainLog l;
        l.sink = [this](const std::string& m) { err << m << '\n'; };
        return l;
    }
};

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_json(const json& j, const fs::path& p) {
    ensure_parent(p);
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << j.dump(2) << '\n';
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw FormatError(p.string() + " is not valid JSON: " + e.what());
    }
}

void record_config(Manifest& m, const RunConfig& cfg) {
    m.config(cfg.to_json(), config_hash(cfg));
    m.seed(cfg.model.seed);
}

RunConfig config_or_default(const std::string& path) {
    if (path.empty()) return {};
    return load_config(path);
}

void check_valid(const RunConfig& cfg) {
    const auto errs = cfg.validate();
    if (errs.empty()) return;
    std::string msg = "invalid settings:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
}

// Model geometry taken from a dataset when no config is given, so
// estimate-dim works on any generated file.
void adapt_to_data(ModelConfig& m, const TrajectoryDataset& ds) {
    m.channels = ds.channels();
    m.height = ds.height();
    m.width = ds.width();
    if (ds.num_frames() < m.window()) {
        m.seq_in = std::max<std::int64_t>(1, ds.num_frames() / 2);
        m.seq_out = std::max<std::int64_t>(1, ds.num_frames() - m.seq_in);
    }
    for (auto* p : {&m.patch_h, &m.patch_w}) {
        const auto extent = p == &m.patch_h ? m.height : m.width;
        while (*p > 1 && extent % *p != 0) *p /= 2;
    }
}

Checkpoint load_full(const fs::path& p) {
    auto ck = load_checkpoint(p);
    if (ck.phase() != kPhaseFull)
        throw ConfigError(p.string() + ": expected a 'full' checkpoint, got '" + ck.phase() + "'");
    return ck;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string kind;
    std::string out;
    std::int64_t num = 0;
    std::uint64_t seed = 0;
    std::string config;
    std::optional<std::int64_t> frames;
    std::optional<std::int64_t> size;
    std::string split = "train";
};

int run_generate(const Context& ctx, const GenerateArgs& a) {
    auto cfg = config_or_default(a.config);
    if (a.frames) cfg.bounce.frames = cfg.nse.records = cfg.swe.records = *a.frames;
    if (a.size) {
        cfg.bounce.height = cfg.bounce.width = *a.size;
        cfg.nse.grid = cfg.swe.grid = *a.size;
    }
    check_valid(cfg);

    TrajectoryDataset ds;
    if (a.kind == "bounce")
        ds = datagen::gen_bouncing(a.num, cfg.bounce, a.seed);
    else if (a.kind == "nse")
        ds = datagen::simulate_nse(cfg.nse, a.num, a.seed);
    else
        ds = datagen::simulate_swe(cfg.swe, a.num, a.seed);
    ds.split = a.split;

    const fs::path out = a.out;
    ensure_parent(out);
    write_dataset(ds, out);

    Manifest m("generate", ctx.args);
    m.config(cfg.to_json(), config_hash(cfg));
    m.seed(a.seed);
    m.set("kind", a.kind);
    if (!a.config.empty()) m.input(a.config);
    m.output(out);
    m.write_beside(out);
    ctx.out << "wrote " << out.string() << " shape [" << ds.shape[0] << ", " << ds.shape[1] << ", " << ds.shape[2]
            << ", " << ds.shape[3] << ", " << ds.shape[4] << "]\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string data;
    std::optional<std::int64_t> neighbors;
    std::optional<std::int64_t> sample;
    std::string config;
    std::string out;
    std::string ckpt;
    std::int64_t max_steps = -1;
};

json estimate_json(const DimEstimate& e) {
    return {{"D", e.D}, {"mean", e.mean}, {"R", e.R}, {"J", e.J}, {"excluded", e.excluded}, {"anchors", e.local.size()}};
}

int run_estimate(const Context& ctx, const EstimateArgs& a) {
    const auto ds = read_dataset(a.data);
    auto cfg = config_or_default(a.config);
    if (a.config.empty()) adapt_to_data(cfg.model, ds);
    if (a.neighbors) cfg.model.lb_neighbors = *a.neighbors;
    if (a.sample) cfg.model.lb_sample = *a.sample;
    check_valid(cfg);

    torch::manual_seed(cfg.model.seed);
    const auto norm = Normalizer::fit(ds);
    const auto ws = WindowSet::build(ds, cfg.model, norm);
    auto log = ctx.log();
    const auto p0 = train_phase0(ws, cfg.model, &log, a.max_steps);

    json result = estimate_json(p0.estimate);
    result["loss_curve"] = p0.losses;
    const fs::path out = a.out.empty() ? cfg.work_path() / "estimate.json" : fs::path(a.out);
    write_json(result, out);

    Manifest m("estimate-dim", ctx.args);
    record_config(m, cfg);
    m.input(a.data);
    if (!a.config.empty()) m.input(a.config);
    m.output(out);
    if (!a.ckpt.empty()) {
        Checkpoint ck;
        ck.header["phase"] = kPhaseAutoencoder;
        ck.header["config"] = cfg.model.to_json();
        ck.header["normalizer"] = norm.to_json();
        ck.header["loss_curve"] = p0.losses;
        ck.header["step"] = p0.losses.size();
        ck.header["estimate"] = estimate_json(p0.estimate);
        ck.put_module("encoder.", *p0.encoder);
        ck.put_module("decoder.", *p0.decoder);
        ensure_parent(a.ckpt);
        save_checkpoint(ck, a.ckpt);
        m.output(a.ckpt);
    }
    m.write_beside(out);
    ctx.out << "D = " << p0.estimate.D << " (mean local " << p0.estimate.mean << ", R " << p0.estimate.R << ", J "
            << p0.estimate.J << ", excluded " << p0.estimate.excluded << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------

TrajectoryDataset training_data(const RunConfig& cfg) {
    if (cfg.train_data.empty()) throw ConfigError("train_data: required by this command");
    return read_dataset(cfg.train_data);
}

int run_pretrain(const Context& ctx, const std::string& config_path) {
    const auto cfg = load_config(config_path);
    const auto ds = training_data(cfg);
    torch::manual_seed(cfg.model.seed);
    const auto norm = Normalizer::fit(ds);
    const auto ws = WindowSet::build(ds, cfg.model, norm);
    auto log = ctx.log();

    const auto p0 = train_phase0(ws, cfg.model, &log);
    const auto latent = cfg.model.latent_dim > 0 ? cfg.model.latent_dim : p0.estimate.D;
    if (cfg.model.latent_dim > 0) log.event("latent_dim fixed by config: D = " + std::to_string(latent));
    const auto p1 = train_phase1(ws, cfg.model, latent, p0.encoder, &log);

    const auto out = cfg.vq_path();
    ensure_parent(out);
    auto ck = vqvae_checkpoint(p1, cfg.model, norm, &p0.estimate);
    ck.header["phase0_loss_curve"] = p0.losses;
    save_checkpoint(ck, out);

    Manifest m("pretrain-vq", ctx.args);
    record_config(m, cfg);
    m.input(config_path);
    m.input(cfg.train_data);
    m.output(out);
    m.set("latent", latent);
    m.set("collapse_warnings", p1.collapse_warnings);
    m.write_beside(out);
    ctx.out << "wrote " << out.string() << " (D = " << latent << ", final loss "
            << (p1.losses.empty() ? 0.0 : p1.losses.back()) << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------

std::vector<std::string> config_differences(const json& a, const json& b) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : a.items())
        if (!b.contains(k) || b.at(k) != v) keys.push_back(k);
    for (const auto& [k, v] : b.items())
        if (!a.contains(k)) keys.push_back(k);
    return keys;
}

int run_train(const Context& ctx, const std::string& config_path, const std::string& resume, std::int64_t max_steps) {
    const auto cfg = load_config(config_path);
    const auto ds = training_data(cfg);
    auto log = ctx.log();
    Manifest m("train", ctx.args);
    record_config(m, cfg);
    m.input(config_path);
    m.input(cfg.train_data);

    std::unique_ptr<FullTrainer> trainer;
    if (!resume.empty()) {
        const auto ck = load_full(resume);
        if (const auto diff = config_differences(ck.header.at("config"), cfg.model.to_json()); !diff.empty()) {
            std::string msg = "config does not match checkpoint " + resume + ":";
            for (const auto& k : diff) msg += " " + k;
            throw ConfigError(msg);
        }
        const auto norm = normalizer_from_checkpoint(ck);
        trainer = std::make_unique<FullTrainer>(WindowSet::build(ds, cfg.model, norm), ck, &log);
        m.input(resume);
        log.event("resumed at step " + std::to_string(trainer->step_count()));
    } else {
        const auto vq = load_checkpoint(cfg.vq_path());
        if (vq.phase() != kPhaseVqvae)
            throw ConfigError(cfg.vq_path().string() + ": expected a 'vqvae' checkpoint, got '" + vq.phase() + "'");
        if (const auto diff = config_differences(vq.header.at("config"), cfg.model.to_json()); !diff.empty()) {
            // Phase-2 settings may change between pretraining and training;
            // anything that shapes the pretrained modules may not.
            static const std::vector<std::string> free = {"epochs_phase2", "checkpoint_every", "lr", "batch_size"};
            for (const auto& k : diff)
                if (std::find(free.begin(), free.end(), k) == free.end())
                    throw ConfigError("config field " + k + " differs from the pretrained checkpoint " +
                                      cfg.vq_path().string());
        }
        const auto norm = Normalizer::from_json(vq.header.at("normalizer"));
        torch::manual_seed(cfg.model.seed);
        trainer = std::make_unique<FullTrainer>(WindowSet::build(ds, cfg.model, norm), cfg.model,
                                                phase1_from_checkpoint(vq), norm, &log);
        m.input(cfg.vq_path());
    }

    const auto out = cfg.checkpoint_path();
    ensure_parent(out);
    const auto save = [&](const FullTrainer& t) {
        save_checkpoint(t.checkpoint(), out);
        log.event("checkpoint at step " + std::to_string(t.step_count()) + " -> " + out.string());
    };
    const auto stop = max_steps >= 0 ? std::min(trainer->total_steps(), trainer->step_count() + max_steps)
                                     : trainer->total_steps();
    const auto chunk = std::max<std::int64_t>(1, trainer->total_steps() / 20);
    while (trainer->step_count() < stop) {
        trainer->run(std::min(chunk, stop - trainer->step_count()), save);
        log.event("step " + std::to_string(trainer->step_count()) + "/" + std::to_string(trainer->total_steps()) +
                  " loss " + std::to_string(trainer->losses().back()));
    }
    save(*trainer);

    m.output(out);
    m.set("step", trainer->step_count());
    m.write_beside(out);
    ctx.out << "wrote " << out.string() << " at step " << trainer->step_count() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

using FrameList = std::vector<std::vector<float>>;

// Channel `c` planes of frames [0, T) from a (T, C, H, W) tensor.
FrameList planes(const torch::Tensor& clip, std::int64_t c) {
    FrameList out;
    const auto t = clip.select(1, c).contiguous();
    for (std::int64_t k = 0; k < t.size(0); ++k) {
        const auto f = t[k].contiguous();
        out.emplace_back(f.data_ptr<float>(), f.data_ptr<float>() + f.numel());
    }
    return out;
}

metrics::VideoView view(const torch::Tensor& t) {
    return {{t.data_ptr<float>(), static_cast<std::size_t>(t.numel())}, {t.size(0), t.size(1), t.size(2), t.size(3)}};
}

int run_eval(const Context& ctx, const std::string& ckpt_path, const std::string& data_path,
             const std::string& report_path) {
    const auto ck = load_full(ckpt_path);
    auto model = model_from_checkpoint(ck);
    const auto norm = normalizer_from_checkpoint(ck);
    const auto& cfg = model->config();
    const auto ds = read_dataset(data_path);
    if (ds.channels() != cfg.channels || ds.height() != cfg.height || ds.width() != cfg.width)
        throw ShapeError("shape mismatch: checkpoint expects frames (C, H, W) = (" + std::to_string(cfg.channels) +
                         ", " + std::to_string(cfg.height) + ", " + std::to_string(cfg.width) + "), data " +
                         data_path + " has (" + std::to_string(ds.channels()) + ", " + std::to_string(ds.height()) +
                         ", " + std::to_string(ds.width()) + ")");
    const auto ws = WindowSet::build(ds, cfg, norm);

    const auto pred = norm.invert(predict_windows(model, ws, cfg.batch_size)).contiguous();
    const auto target = norm.invert(ws.targets).contiguous();
    const auto input = norm.invert(ws.inputs).contiguous();
    const auto fold = [&](const torch::Tensor& t) { return t.reshape({-1, cfg.channels, cfg.height, cfg.width}).contiguous(); };
    const auto p = fold(pred), y = fold(target);
    const auto report = metrics::evaluate(view(p), view(y), norm.scale());

    json j;
    j["metrics"] = report.to_json();
    j["data_range"] = norm.scale();
    j["normalizer"] = norm.to_json();
    j["windows"] = ws.size();
    j["copy_last_mse"] = copy_last_baseline(ws) * norm.scale() * norm.scale();
    j["checkpoint"] = {{"path", ckpt_path}, {"step", ck.header.value("step", std::int64_t{0})}};
    j["data"] = data_path;
    j["loss_curve"] = ck.header.value("loss_curve", std::vector<double>{});
    j["sample"] = {{"window", 0},
                   {"channel", 0},
                   {"height", cfg.height},
                   {"width", cfg.width},
                   {"input", planes(input[0], 0)},
                   {"target", planes(target[0], 0)},
                   {"prediction", planes(pred[0], 0)}};
    write_json(j, report_path);

    Manifest m("eval", ctx.args);
    m.config(ck.header.at("config"), sha256_hex(ck.header.at("config").dump()));
    m.seed(cfg.seed);
    m.input(ckpt_path);
    m.input(data_path);
    m.output(report_path);
    m.write_beside(report_path);
    ctx.out << "mse " << report.mse_pixel << "  mae " << report.mae_pixel << "  ssim " << report.ssim << "  psnr "
            << report.psnr << "  (copy-last mse " << j["copy_last_mse"].get<double>() << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------

int run_predict(const Context& ctx, const std::string& ckpt_path, const std::string& input_path,
                const std::string& out_path) {
    const auto ck = load_full(ckpt_path);
    auto model = model_from_checkpoint(ck);
    const auto norm = normalizer_from_checkpoint(ck);
    const auto& cfg = model->config();
    const auto ds = read_dataset(input_path);
    if (ds.num_frames() < cfg.seq_in)
        throw ShapeError("shape mismatch: " + input_path + " has " + std::to_string(ds.num_frames()) +
                         " frames per trajectory, the model needs " + std::to_string(cfg.seq_in));

    TrajectoryDataset out;
    out.generator = "pastnet-predict";
    out.params = {{"checkpoint_sha256", sha256_file(ckpt_path)}, {"source", ds.generator}, {"source_seed", ds.seed}};
    out.seed = ds.seed;
    out.dt_record = ds.dt_record;
    out.split = "prediction";
    out.resize({ds.num_trajectories(), cfg.seq_out, ds.channels(), ds.height(), ds.width()});
    for (std::int64_t n = 0; n < ds.num_trajectories(); ++n) {
        const auto last = ds.frames(n, ds.num_frames() - cfg.seq_in, cfg.seq_in);
        const auto clip = torch::from_blob(const_cast<float*>(last.data()),
                                           {cfg.seq_in, ds.channels(), ds.height(), ds.width()}, torch::kFloat32);
        const auto y = norm.invert(predict(model, norm.apply(clip))).contiguous();
        std::copy_n(y.data_ptr<float>(), y.numel(), out.frames(n, 0, cfg.seq_out).begin());
    }
    ensure_parent(out_path);
    write_dataset(out, out_path);

    Manifest m("predict", ctx.args);
    m.config(ck.header.at("config"), sha256_hex(ck.header.at("config").dump()));
    m.seed(cfg.seed);
    m.input(ckpt_path);
    m.input(input_path);
    m.output(out_path);
    m.write_beside(out_path);
    ctx.out << "wrote " << out_path << " (" << out.num_trajectories() << " x " << cfg.seq_out << " frames)\n";
    return 0;
}

// ---------------------------------------------------------------------------

int run_plot(const Context& ctx, const std::string& report_path, const std::string& out_dir) {
    const auto report = read_json(report_path);
    const fs::path dir = out_dir;
    fs::create_directories(dir);
    Manifest m("plot", ctx.args);
    m.input(report_path);

    std::vector<fs::path> written;
    if (const auto curve = report.value("loss_curve", std::vector<double>{}); !curve.empty()) {
        written.push_back(dir / "loss_curve.png");
        write_png(line_chart(curve, 640, 360), written.back());
    }
    if (report.contains("sample")) {
        const auto& s = report.at("sample");
        const auto h = s.at("height").get<std::int64_t>(), w = s.at("width").get<std::int64_t>();
        std::vector<FrameList> rows;
        double lo = report.contains("normalizer") ? report["normalizer"].value("lo", 0.0) : 0.0;
        double hi = report.contains("normalizer") ? report["normalizer"].value("hi", 1.0) : 1.0;
        for (const char* key : {"input", "target", "prediction"})
            if (s.contains(key)) rows.push_back(s.at(key).get<FrameList>());
        const auto zoom = std::max<std::int64_t>(1, 96 / std::max(h, w));
        written.push_back(dir / "frames.png");
        write_png(frame_grid(rows, h, w, lo, hi, zoom), written.back());
    }
    if (written.empty()) throw FormatError(report_path + ": no loss_curve or sample to plot");
    for (const auto& p : written) {
        m.output(p);
        ctx.out << "wrote " << p.string() << "\n";
    }
    m.write_beside(dir);
    return 0;
}

// ---------------------------------------------------------------------------

int run_schema(const Context& ctx) {
    ctx.out << config_schema().dump(2) << '\n';
    return 0;
}

int run_check_config(const Context& ctx, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    const auto parsed = parse_config(j);
    if (parsed.errors.empty()) {
        ctx.out << path << ": ok (hash " << config_hash(parsed.config) << ")\n";
        return 0;
    }
    for (const auto& e : parsed.errors) ctx.err << path << ": " << e << '\n';
    return 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"PastNet video prediction: data generation, training, evaluation", "pastnet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", PASTNET_VERSION);
    Context ctx{args, out, err};
    std::function<int()> action;

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate a trajectory dataset");
    g->add_option("--kind", gen.kind, "Generator")->required()->check(CLI::IsMember({"bounce", "nse", "swe"}));
    g->add_option("--out", gen.out, "Output dataset (.pstj)")->required();
    g->add_option("--num", gen.num, "Number of trajectories")->required()->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "Seed")->required();
    g->add_option("--config", gen.config, "Run config supplying generator settings");
    g->add_option("--frames", gen.frames, "Frames per trajectory")->check(CLI::PositiveNumber);
    g->add_option("--size", gen.size, "Frame height and width")->check(CLI::PositiveNumber);
    g->add_option("--split", gen.split, "Split label stored in the metadata")->capture_default_str();
    g->callback([&] { action = [&] { return run_generate(ctx, gen); }; });

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate-dim", "Train the phase-0 autoencoder and estimate the latent dimension");
    e->add_option("--data", est.data, "Dataset (.pstj)")->required();
    e->add_option("--neighbors", est.neighbors, "Neighbors per anchor (R)")->check(CLI::Range(3, 1 << 20));
    e->add_option("--sample", est.sample, "Anchor sample size (J)")->check(CLI::PositiveNumber);
    e->add_option("--config", est.config, "Run config; model geometry follows the data when omitted");
    e->add_option("--out", est.out, "Estimate JSON (default <out dir>/estimate.json)");
    e->add_option("--ckpt", est.ckpt, "Also save the autoencoder checkpoint here");
    e->add_option("--max-steps", est.max_steps, "Cap on phase-0 optimizer steps (-1: configured epochs)");
    e->callback([&] { action = [&] { return run_estimate(ctx, est); }; });

    std::string config_path;
    auto* v = app.add_subcommand("pretrain-vq", "Run phases 0 and 1 and save the quantized autoencoder");
    v->add_option("--config", config_path, "Run config")->required();
    v->callback([&] { action = [&] { return run_pretrain(ctx, config_path); }; });

    std::string resume;
    std::int64_t max_steps = -1;
    auto* t = app.add_subcommand("train", "Train the full model from the pretrained checkpoint");
    t->add_option("--config", config_path, "Run config")->required();
    t->add_option("--resume", resume, "Continue from a full checkpoint");
    t->add_option("--max-steps", max_steps, "Stop after this many more steps (-1: until the configured total)");
    t->callback([&] { action = [&] { return run_train(ctx, config_path, resume, max_steps); }; });

    std::string ckpt, data, report, input, output;
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    ev->add_option("--ckpt", ckpt, "Full checkpoint")->required();
    ev->add_option("--data", data, "Dataset (.pstj)")->required();
    ev->add_option("--report", report, "Report JSON")->required();
    ev->callback([&] { action = [&] { return run_eval(ctx, ckpt, data, report); }; });

    auto* p = app.add_subcommand("predict", "Forecast from the last observed frames of each trajectory");
    p->add_option("--ckpt", ckpt, "Full checkpoint")->required();
    p->add_option("--input", input, "Dataset (.pstj)")->required();
    p->add_option("--out", output, "Prediction dataset (.pstj)")->required();
    p->callback([&] { action = [&] { return run_predict(ctx, ckpt, input, output); }; });

    auto* pl = app.add_subcommand("plot", "Render loss curves and frame strips from a report");
    pl->add_option("--report", report, "Report JSON")->required();
    pl->add_option("--out", output, "Output directory")->required();
    pl->callback([&] { action = [&] { return run_plot(ctx, report, output); }; });

    auto* sc = app.add_subcommand("schema", "Print the run-config JSON schema");
    sc->callback([&] { action = [&] { return run_schema(ctx); }; });

    auto* cc = app.add_subcommand("check-config", "Validate a run config and list every problem");
    cc->add_option("config", config_path, "Run config")->required();
    cc->callback([&] { action = [&] { return run_check_config(ctx, config_path); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << PASTNET_VERSION << '\n';
        return 0;
    } catch (const CLI::ParseError& ex) {
        err << "error: " << ex.what() << "\n\n";
        const auto* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << failed->help();
        return 2;
    }

    try {
        return action();
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 1;
    }
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, out, err);
}

}  // namespace pastnet::cli
