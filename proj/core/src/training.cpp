// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "pastnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <ATen/Context.h>

#include "pastnet/datagen.hpp"
#include "pastnet/error.hpp"

namespace pastnet {

using datagen::derive_seed;

namespace {

// Sub-seeds per phase, for data order and parameter init.
constexpr std::uint64_t kOrderPhase0 = 0, kOrderPhase1 = 1, kOrderPhase2 = 2;
constexpr std::uint64_t kInitPhase1 = 11, kInitPhase2 = 12, kEstimateSeed = 100;

void check_finite(double loss, int phase, std::int64_t step, double lr) {
    if (std::isfinite(loss)) return;
    std::ostringstream os;
    os << "phase " << phase << " step " << step << ": non-finite loss (" << loss << "); lr=" << lr
       << " may be too high, try lowering it";
    throw NumericalError(os.str());
}

torch::Tensor frames_of(const WindowSet& ws, const std::vector<std::int64_t>& idx) {
    auto x = ws.inputs.index_select(0, torch::tensor(idx, torch::kLong));
    return x.reshape({-1, x.size(2), x.size(3), x.size(4)});
}

std::int64_t phase_steps(std::int64_t epochs, std::int64_t n, std::int64_t batch, std::int64_t max_steps) {
    const auto full = epochs * steps_per_epoch(n, batch);
    return max_steps >= 0 ? max_steps : full;
}

std::vector<torch::Tensor> params_of(std::initializer_list<const torch::nn::Module*> mods) {
    std::vector<torch::Tensor> out;
    for (const auto* m : mods)
        for (const auto& p : m->parameters())
            if (p.requires_grad()) out.push_back(p);
    return out;
}

void copy_params(const torch::nn::Module& src, torch::nn::Module& dst) {
    torch::NoGradGuard ng;
    auto from = src.named_parameters();
    for (auto& p : dst.named_parameters()) {
        const auto* s = from.find(p.key());
        if (s == nullptr || !s->sizes().equals(p.value().sizes()))
            throw ConfigError("parameter '" + p.key() + "' missing or reshaped between phases");
        p.value().copy_(*s);
    }
}

std::string hex(const torch::Tensor& bytes) {
    const auto t = bytes.contiguous();
    const auto* p = t.data_ptr<std::uint8_t>();
    std::string s;
    s.reserve(static_cast<std::size_t>(t.numel()) * 2);
    char buf[3];
    for (std::int64_t i = 0; i < t.numel(); ++i) {
        std::snprintf(buf, sizeof buf, "%02x", p[i]);
        s += buf;
    }
    return s;
}

nlohmann::json rng_state(std::uint64_t seed) {
    auto gen = at::globalContext().defaultGenerator(c10::DeviceType::CPU);
    return {{"seed", seed}, {"data_order", "epoch permutations derived from (seed, phase, epoch)"},
            {"torch_cpu", hex(gen.get_state())}};
}

}  // namespace

Normalizer Normalizer::fit(const TrajectoryDataset& ds) {
    if (ds.data.empty()) throw ConfigError("cannot normalize an empty dataset");
    const auto [mn, mx] = std::minmax_element(ds.data.begin(), ds.data.end());
    return {static_cast<double>(*mn), static_cast<double>(*mx)};
}

Normalizer Normalizer::from_json(const nlohmann::json& j) { return {j.at("lo").get<double>(), j.at("hi").get<double>()}; }

WindowSet WindowSet::slice(std::int64_t begin, std::int64_t end) const {
    return {inputs.slice(0, begin, end), targets.slice(0, begin, end)};
}

WindowSet WindowSet::build(const TrajectoryDataset& ds, const ModelConfig& cfg, const Normalizer& norm) {
    if (ds.channels() != cfg.channels || ds.height() != cfg.height || ds.width() != cfg.width) {
        std::ostringstream os;
        os << "dataset frames (C, H, W) = (" << ds.channels() << ", " << ds.height() << ", " << ds.width()
           << ") do not match config (" << cfg.channels << ", " << cfg.height << ", " << cfg.width << ")";
        throw ShapeError(os.str());
    }
    if (ds.num_frames() < cfg.window())
        throw ConfigError("dataset trajectories have " + std::to_string(ds.num_frames()) + " frames, need T + T_f = " +
                          std::to_string(cfg.window()));
    if (ds.num_trajectories() < 1) throw ConfigError("dataset is empty");
    const auto per_traj = (ds.num_frames() - cfg.window()) / cfg.stride() + 1;
    const auto n = ds.num_trajectories() * per_traj;
    const std::vector<std::int64_t> fshape{ds.channels(), ds.height(), ds.width()};
    auto all = torch::from_blob(const_cast<float*>(ds.data.data()),
                                {ds.num_trajectories(), ds.num_frames(), ds.channels(), ds.height(), ds.width()},
                                torch::kFloat);
    std::vector<torch::Tensor> in, out;
    in.reserve(static_cast<std::size_t>(n));
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < ds.num_trajectories(); ++i) {
        for (std::int64_t w = 0; w < per_traj; ++w) {
            const auto t0 = w * cfg.stride();
            in.push_back(all[i].slice(0, t0, t0 + cfg.seq_in));
            out.push_back(all[i].slice(0, t0 + cfg.seq_in, t0 + cfg.window()));
        }
    }
    return {norm.apply(torch::stack(in)).contiguous(), norm.apply(torch::stack(out)).contiguous()};
}

std::vector<std::int64_t> epoch_order(std::int64_t n, std::uint64_t seed, std::int64_t epoch) {
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
    for (std::int64_t i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<std::int64_t> pick(0, i);
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
    }
    return order;
}

std::int64_t steps_per_epoch(std::int64_t n, std::int64_t batch) { return (n + batch - 1) / batch; }

std::vector<std::int64_t> batch_indices(std::int64_t n, std::int64_t batch, std::uint64_t seed, std::int64_t step) {
    const auto spe = steps_per_epoch(n, batch);
    const auto order = epoch_order(n, seed, step / spe);
    const auto begin = (step % spe) * batch;
    const auto end = std::min(n, begin + batch);
    return {order.begin() + begin, order.begin() + end};
}

double copy_last_baseline(const WindowSet& ws) {
    torch::NoGradGuard ng;
    const auto last = ws.inputs.select(1, ws.inputs.size(1) - 1).unsqueeze(1);
    return (last - ws.targets).pow(2).mean().item<double>();
}

void TrainLog::event(const std::string& msg) {
    events.push_back(msg);
    if (sink) sink(msg);
}

Phase0Result train_phase0(const WindowSet& train, const ModelConfig& cfg, TrainLog* log, std::int64_t max_steps) {
    cfg.check();
    const auto n_all = train.size();
    if (n_all < 1) throw ConfigError("phase 0: no training windows");
    const auto n_hold = n_all >= 2 ? std::max<std::int64_t>(1, n_all / 10) : 0;
    const auto fit = train.slice(0, n_all - n_hold);
    const auto hold = n_hold > 0 ? train.slice(n_all - n_hold, n_all) : train;

    torch::manual_seed(cfg.seed);
    Phase0Result r;
    r.encoder = dst::Encoder(
        dst::EncoderOptions{cfg.channels, cfg.enc_hidden, cfg.c_max, cfg.enc_conv_blocks, cfg.enc_res_blocks});
    r.decoder = dst::Decoder(
        dst::DecoderOptions{cfg.c_max, cfg.enc_hidden, cfg.channels, cfg.dec_res_blocks, cfg.dec_deconv_blocks});
    torch::optim::Adam opt(params_of({r.encoder.get(), r.decoder.get()}), torch::optim::AdamOptions(cfg.lr));

    const auto seed = derive_seed(cfg.seed, kOrderPhase0);
    const auto steps = phase_steps(cfg.epochs_phase0, fit.size(), cfg.batch_size, max_steps);
    r.encoder->train();
    r.decoder->train();
    for (std::int64_t s = 0; s < steps; ++s) {
        const auto x = frames_of(fit, batch_indices(fit.size(), cfg.batch_size, seed, s));
        const auto loss = (x - r.decoder(r.encoder(x))).pow(2).sum();
        const double v = loss.item<double>();
        check_finite(v, 0, s, cfg.lr);
        opt.zero_grad();
        loss.backward();
        opt.step();
        r.losses.push_back(v);
    }

    r.encoder->eval();
    torch::Tensor feats;
    {
        torch::NoGradGuard ng;
        feats = r.encoder(hold.inputs.reshape({-1, cfg.channels, cfg.height, cfg.width}));
    }
    const auto rows = feats.size(0) * feats.size(2) * feats.size(3);
    r.estimate = intrinsic_dim(feats, cfg.lb_neighbors, std::min(cfg.lb_sample, rows), derive_seed(cfg.seed, kEstimateSeed));
    if (log) {
        std::ostringstream os;
        os << "phase 0: estimated D = " << r.estimate.D << " (mean local " << r.estimate.mean << ", R "
           << r.estimate.R << ", J " << r.estimate.J << ", excluded " << r.estimate.excluded << ")";
        log->event(os.str());
    }
    return r;
}

Phase1Result train_phase1(const WindowSet& train, const ModelConfig& cfg, std::int64_t latent, dst::Encoder encoder,
                          TrainLog* log, std::int64_t max_steps) {
    cfg.check();
    if (latent < 1) throw ConfigError("latent_dim: must be >= 1, got " + std::to_string(latent));
    if (train.size() < 1) throw ConfigError("phase 1: no training windows");
    torch::manual_seed(derive_seed(cfg.seed, kInitPhase1));
    Phase1Result r;
    r.latent = latent;
    r.encoder = std::move(encoder);
    r.encoder->rebuild_head(latent);
    r.bank = dst::MemoryBank(latent * latent, latent);
    r.recon = dst::Decoder(
        dst::DecoderOptions{latent, cfg.enc_hidden, cfg.channels, cfg.dec_res_blocks, cfg.dec_deconv_blocks});
    torch::optim::Adam opt(params_of({r.encoder.get(), r.bank.get(), r.recon.get()}), torch::optim::AdamOptions(cfg.lr));

    const auto seed = derive_seed(cfg.seed, kOrderPhase1);
    const auto steps = phase_steps(cfg.epochs_phase1, train.size(), cfg.batch_size, max_steps);
    r.encoder->train();
    r.recon->train();
    std::int64_t streak = 0;
    for (std::int64_t s = 0; s < steps; ++s) {
        const auto x = frames_of(train, batch_indices(train.size(), cfg.batch_size, seed, s));
        const auto z = r.encoder(x);
        const auto q = r.bank->quantize(z);
        const auto recon = r.recon(dst::straight_through(z, q.quantized));
        const auto l = dst::vq_loss(x, recon, z, q.quantized, cfg.beta);
        const double v = l.total.item<double>();
        check_finite(v, 1, s, cfg.lr);
        opt.zero_grad();
        l.total.backward();
        opt.step();
        r.losses.push_back(v);

        const auto counts = torch::bincount(q.indices.flatten(), {}, r.bank->size());
        const double share = counts.max().item<double>() / static_cast<double>(q.indices.numel());
        streak = share >= kCollapseShare ? streak + 1 : 0;
        if (streak == kCollapseSteps) {
            ++r.collapse_warnings;
            if (log) {
                std::ostringstream os;
                os << "phase 1 step " << s << ": codebook collapse warning, >= " << kCollapseShare * 100
                   << "% of assignments on one codeword for " << kCollapseSteps << " consecutive steps";
                log->event(os.str());
            }
        }
    }
    r.encoder->eval();
    r.recon->eval();
    return r;
}

Checkpoint vqvae_checkpoint(const Phase1Result& p1, const ModelConfig& cfg, const Normalizer& norm,
                            const DimEstimate* estimate) {
    Checkpoint ck;
    ck.header["phase"] = kPhaseVqvae;
    ck.header["config"] = cfg.to_json();
    ck.header["latent"] = p1.latent;
    ck.header["normalizer"] = norm.to_json();
    ck.header["loss_curve"] = p1.losses;
    ck.header["collapse_warnings"] = p1.collapse_warnings;
    ck.header["step"] = p1.losses.size();
    ck.header["rng"] = rng_state(cfg.seed);
    if (estimate) {
        ck.header["estimate"] = {{"D", estimate->D},
                                 {"mean", estimate->mean},
                                 {"R", estimate->R},
                                 {"J", estimate->J},
                                 {"excluded", estimate->excluded}};
    }
    ck.put_module("encoder.", *p1.encoder);
    ck.put_module("bank.", *p1.bank);
    ck.put_module("recon.", *p1.recon);
    return ck;
}

Phase1Result phase1_from_checkpoint(const Checkpoint& ck) {
    if (ck.phase() != kPhaseVqvae) throw ConfigError("expected a 'vqvae' checkpoint, got '" + ck.phase() + "'");
    const auto cfg = ModelConfig::from_json(ck.header.at("config"));
    Phase1Result r;
    r.latent = ck.header.at("latent").get<std::int64_t>();
    r.encoder = dst::Encoder(
        dst::EncoderOptions{cfg.channels, cfg.enc_hidden, r.latent, cfg.enc_conv_blocks, cfg.enc_res_blocks});
    r.bank = dst::MemoryBank(r.latent * r.latent, r.latent);
    r.recon = dst::Decoder(
        dst::DecoderOptions{r.latent, cfg.enc_hidden, cfg.channels, cfg.dec_res_blocks, cfg.dec_deconv_blocks});
    ck.load_module("encoder.", *r.encoder);
    ck.load_module("bank.", *r.bank);
    ck.load_module("recon.", *r.recon);
    r.losses = ck.header.value("loss_curve", std::vector<double>{});
    r.collapse_warnings = ck.header.value("collapse_warnings", std::int64_t{0});
    return r;
}

FullTrainer::FullTrainer(WindowSet train, const ModelConfig& cfg, const Phase1Result& p1, const Normalizer& norm,
                         TrainLog* log)
    : train_(std::move(train)), cfg_(cfg), norm_(norm), log_(log) {
    cfg_.check();
    if (train_.size() < 1) throw ConfigError("phase 2: no training windows");
    torch::manual_seed(derive_seed(cfg_.seed, kInitPhase2));
    model_ = PastNet(cfg_, p1.latent);
    copy_params(*p1.encoder, *model_->dst->encoder);
    copy_params(*p1.bank, *model_->dst->bank);
    model_->dst->bank->set_frozen(true);
    make_optimizer();
}

FullTrainer::FullTrainer(WindowSet train, const Checkpoint& ck, TrainLog* log) : train_(std::move(train)), log_(log) {
    if (ck.phase() != kPhaseFull) throw ConfigError("resume needs a 'full' checkpoint, got '" + ck.phase() + "'");
    cfg_ = ModelConfig::from_json(ck.header.at("config"));
    norm_ = Normalizer::from_json(ck.header.at("normalizer"));
    model_ = PastNet(cfg_, ck.header.at("latent").get<std::int64_t>());
    ck.load_module("model.", *model_);
    model_->dst->bank->set_frozen(true);
    make_optimizer();

    step_ = ck.header.at("step").get<std::int64_t>();
    losses_ = ck.header.value("loss_curve", std::vector<double>{});
    const auto& adam = ck.header.at("adam");
    auto& state = opt_->state();
    for (auto& [name, p] : trainable_) {
        if (!adam.contains(name)) continue;
        auto s = std::make_unique<torch::optim::AdamParamState>();
        s->step(adam.at(name).get<std::int64_t>());
        s->exp_avg(ck.tensor("adam." + name + ".exp_avg").clone());
        s->exp_avg_sq(ck.tensor("adam." + name + ".exp_avg_sq").clone());
        state[p.unsafeGetTensorImpl()] = std::move(s);
    }
}

void FullTrainer::make_optimizer() {
    trainable_.clear();
    std::vector<torch::Tensor> params;
    for (const auto& p : model_->named_parameters()) {
        if (!p.value().requires_grad()) continue;
        trainable_.emplace_back(p.key(), p.value());
        params.push_back(p.value());
    }
    opt_ = std::make_unique<torch::optim::Adam>(params, torch::optim::AdamOptions(cfg_.lr));
}

std::int64_t FullTrainer::total_steps() const {
    return cfg_.epochs_phase2 * steps_per_epoch(train_.size(), cfg_.batch_size);
}

double FullTrainer::step() {
    const auto idx = torch::tensor(
        batch_indices(train_.size(), cfg_.batch_size, derive_seed(cfg_.seed, kOrderPhase2), step_), torch::kLong);
    const auto x = train_.inputs.index_select(0, idx);
    const auto y = train_.targets.index_select(0, idx);
    model_->train();
    const auto pred = model_->run(x, true).prediction;
    const auto loss = torch::mse_loss(pred, y);
    const double v = loss.item<double>();
    check_finite(v, 2, step_, cfg_.lr);
    opt_->zero_grad();
    loss.backward();
    opt_->step();
    ++step_;
    losses_.push_back(v);
    return v;
}

void FullTrainer::run(std::int64_t max_steps, const std::function<void(const FullTrainer&)>& on_checkpoint) {
    const auto stop = max_steps >= 0 ? std::min(total_steps(), step_ + max_steps) : total_steps();
    while (step_ < stop) {
        step();
        if (on_checkpoint && cfg_.checkpoint_every > 0 && step_ % cfg_.checkpoint_every == 0) on_checkpoint(*this);
    }
}

double FullTrainer::train_mse() {
    const auto pred = predict_windows(model_, train_, cfg_.batch_size);
    return (pred - train_.targets).pow(2).mean().item<double>();
}

Checkpoint FullTrainer::checkpoint() const {
    Checkpoint ck;
    ck.header["phase"] = kPhaseFull;
    ck.header["config"] = cfg_.to_json();
    ck.header["latent"] = model_->latent();
    ck.header["normalizer"] = norm_.to_json();
    ck.header["step"] = step_;
    ck.header["loss_curve"] = losses_;
    ck.header["rng"] = rng_state(cfg_.seed);
    ck.put_module("model.", *model_);
    nlohmann::json adam = nlohmann::json::object();
    const auto& state = opt_->state();
    for (const auto& [name, p] : trainable_) {
        auto it = state.find(p.unsafeGetTensorImpl());
        if (it == state.end()) continue;
        const auto& s = static_cast<const torch::optim::AdamParamState&>(*it->second);
        adam[name] = s.step();
        ck.put("adam." + name + ".exp_avg", s.exp_avg());
        ck.put("adam." + name + ".exp_avg_sq", s.exp_avg_sq());
    }
    ck.header["adam"] = adam;
    return ck;
}

PastNet model_from_checkpoint(const Checkpoint& ck) {
    if (ck.phase() != kPhaseFull) throw ConfigError("expected a 'full' checkpoint, got '" + ck.phase() + "'");
    const auto cfg = ModelConfig::from_json(ck.header.at("config"));
    PastNet m(cfg, ck.header.at("latent").get<std::int64_t>());
    ck.load_module("model.", *m);
    m->dst->bank->set_frozen(true);
    m->eval();
    return m;
}

Normalizer normalizer_from_checkpoint(const Checkpoint& ck) { return Normalizer::from_json(ck.header.at("normalizer")); }

torch::Tensor predict_windows(PastNet& model, const WindowSet& ws, std::int64_t batch) {
    std::vector<torch::Tensor> out;
    for (std::int64_t b = 0; b < ws.size(); b += batch) {
        const auto e = std::min(ws.size(), b + batch);
        out.push_back(predict(model, ws.inputs.slice(0, b, e)));
    }
    return torch::cat(out);
}

}  // namespace pastnet
