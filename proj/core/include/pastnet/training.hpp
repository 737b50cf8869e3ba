// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Three training phases:
//   0  encoder (c_max wide) + reconstruction decoder, then dimension estimate
//   1  quantized autoencoder with D^2 codewords
//   2  full model on (past, future) windows, codebook frozen

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "pastnet/checkpoint.hpp"
#include "pastnet/dataset.hpp"
#include "pastnet/dst.hpp"
#include "pastnet/intrinsic_dim.hpp"
#include "pastnet/model.hpp"

namespace pastnet {

/// Affine map of the dataset range onto [0, 1].
struct Normalizer {
    double lo = 0.0;
    double hi = 1.0;

    static Normalizer fit(const TrajectoryDataset& ds);
    double scale() const { return hi > lo ? hi - lo : 1.0; }
    torch::Tensor apply(const torch::Tensor& x) const { return (x - lo) / scale(); }
    torch::Tensor invert(const torch::Tensor& x) const { return x * scale() + lo; }

    nlohmann::json to_json() const { return {{"lo", lo}, {"hi", hi}}; }
    static Normalizer from_json(const nlohmann::json& j);
};

/// All (past, future) windows of a dataset, normalized.
struct WindowSet {
    torch::Tensor inputs;   // (W, T, C, H, W)
    torch::Tensor targets;  // (W, T_f, C, H, W)

    std::int64_t size() const { return inputs.defined() ? inputs.size(0) : 0; }
    WindowSet slice(std::int64_t begin, std::int64_t end) const;

    /// Throws ShapeError when the frame shape differs from the config and
    /// ConfigError when trajectories are shorter than T + T_f.
    static WindowSet build(const TrajectoryDataset& ds, const ModelConfig& cfg, const Normalizer& norm);
};

/// Permutation of [0, n) used for `epoch`; a pure function of (seed, epoch).
std::vector<std::int64_t> epoch_order(std::int64_t n, std::uint64_t seed, std::int64_t epoch);

/// Window indices of optimizer step `step` (0-based) with batch size B.
std::vector<std::int64_t> batch_indices(std::int64_t n, std::int64_t batch, std::uint64_t seed, std::int64_t step);

std::int64_t steps_per_epoch(std::int64_t n, std::int64_t batch);

/// mean over windows of (V_T - V_{T+k})^2: repeat the last observed frame.
double copy_last_baseline(const WindowSet& ws);

struct TrainLog {
    std::vector<std::string> events;
    std::function<void(const std::string&)> sink;
    void event(const std::string& msg);
};

struct Phase0Result {
    dst::Encoder encoder{nullptr};
    dst::Decoder decoder{nullptr};
    DimEstimate estimate;
    std::vector<double> losses;
};

/// `max_steps` < 0 runs epochs_phase0 full epochs.
Phase0Result train_phase0(const WindowSet& train, const ModelConfig& cfg, TrainLog* log = nullptr,
                          std::int64_t max_steps = -1);

struct Phase1Result {
    std::int64_t latent = 0;
    dst::Encoder encoder{nullptr};
    dst::MemoryBank bank{nullptr};
    dst::Decoder recon{nullptr};
    std::vector<double> losses;
    std::int64_t collapse_warnings = 0;
};

/// Rebuilds the encoder head to width D and trains it with a D^2 bank and a
/// fresh reconstruction decoder.
Phase1Result train_phase1(const WindowSet& train, const ModelConfig& cfg, std::int64_t latent, dst::Encoder encoder,
                          TrainLog* log = nullptr, std::int64_t max_steps = -1);

/// Streak of >= 99% of assignments on one codeword that raises a collapse warning.
inline constexpr std::int64_t kCollapseSteps = 100;
inline constexpr double kCollapseShare = 0.99;

Checkpoint vqvae_checkpoint(const Phase1Result& p1, const ModelConfig& cfg, const Normalizer& norm,
                            const DimEstimate* estimate = nullptr);
Phase1Result phase1_from_checkpoint(const Checkpoint& ck);

class FullTrainer {
public:
    FullTrainer(WindowSet train, const ModelConfig& cfg, const Phase1Result& p1, const Normalizer& norm,
                TrainLog* log = nullptr);
    /// Resume state, model and optimizer from a "full" checkpoint.
    FullTrainer(WindowSet train, const Checkpoint& ck, TrainLog* log = nullptr);

    /// One optimizer step; returns the batch loss before the update.
    double step();
    /// Runs until total_steps() (or `max_steps` more steps when >= 0).
    void run(std::int64_t max_steps = -1, const std::function<void(const FullTrainer&)>& on_checkpoint = {});

    std::int64_t step_count() const { return step_; }
    std::int64_t total_steps() const;
    const std::vector<double>& losses() const { return losses_; }

    /// Mean element MSE over all training windows in evaluation mode.
    double train_mse();

    Checkpoint checkpoint() const;
    PastNet& model() { return model_; }
    const ModelConfig& config() const { return cfg_; }

private:
    void make_optimizer();

    WindowSet train_;
    ModelConfig cfg_;
    Normalizer norm_;
    TrainLog* log_ = nullptr;
    PastNet model_{nullptr};
    std::vector<std::pair<std::string, torch::Tensor>> trainable_;
    std::unique_ptr<torch::optim::Adam> opt_;
    std::int64_t step_ = 0;
    std::vector<double> losses_;
};

/// Rebuilds a model from a "full" checkpoint in evaluation mode.
/// Throws ConfigError for any other phase tag.
PastNet model_from_checkpoint(const Checkpoint& ck);
Normalizer normalizer_from_checkpoint(const Checkpoint& ck);

/// Evaluation-mode predictions for every window, (W, T_f, C, H, W), normalized units.
torch::Tensor predict_windows(PastNet& model, const WindowSet& ws, std::int64_t batch = 4);

}  // namespace pastnet
