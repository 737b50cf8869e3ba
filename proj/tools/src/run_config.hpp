// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat run configuration for the command-line tool. Model keys keep their
// ModelConfig names; generator keys carry a bounce_, nse_ or swe_ prefix.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pastnet/datagen.hpp"
#include "pastnet/model.hpp"

namespace pastnet::cli {

/// Environment variable naming the default output directory.
inline constexpr char kOutDirEnv[] = "PASTNET_OUT_DIR";

/// $PASTNET_OUT_DIR, or "pastnet-out" when unset or empty.
std::filesystem::path default_out_dir();

struct RunConfig {
    ModelConfig model;
    datagen::BounceConfig bounce;
    datagen::NseConfig nse;
    datagen::SweConfig swe;

    std::string train_data;     // dataset used by pretrain-vq and train
    std::string work_dir;       // empty: default_out_dir()
    std::string vq_checkpoint;  // empty: <work_dir>/vqvae.ckpt
    std::string checkpoint;     // empty: <work_dir>/model.ckpt

    std::filesystem::path work_path() const;
    std::filesystem::path vq_path() const;
    std::filesystem::path checkpoint_path() const;

    /// Every constraint violation, each prefixed by its key.
    std::vector<std::string> validate() const;

    nlohmann::json to_json() const;
};

struct ParsedConfig {
    RunConfig config;
    std::vector<std::string> errors;  // unknown keys, type mismatches, constraint violations
};

/// Strict parse; never throws for content problems, all of them land in `errors`.
ParsedConfig parse_config(const nlohmann::json& j);

/// Reads and parses `path`. Throws ConfigError listing every problem.
RunConfig load_config(const std::filesystem::path& path);

/// JSON Schema (draft 2020-12) describing every key, with defaults.
nlohmann::json config_schema();

/// Lowercase hex SHA-256 of the canonical JSON dump.
std::string config_hash(const RunConfig& cfg);

}  // namespace pastnet::cli
