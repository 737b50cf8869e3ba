// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint file:
//   "PSTCKPT1"
//   uint64 LE header length, then that many bytes of UTF-8 JSON
//   blobs until EOF, each: uint32 LE name length, name bytes,
//                          uint64 LE byte length, LE float32 data
// Blob shapes are listed in header["blobs"] in file order.

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace pastnet {

inline constexpr char kCheckpointMagic[] = "PSTCKPT1";

/// Phase tags.
inline constexpr char kPhaseAutoencoder[] = "autoencoder";
inline constexpr char kPhaseVqvae[] = "vqvae";
inline constexpr char kPhaseFull[] = "full";

struct Checkpoint {
    nlohmann::json header = nlohmann::json::object();
    std::vector<std::pair<std::string, torch::Tensor>> tensors;  // float32, CPU

    std::string phase() const;
    bool has(const std::string& name) const;
    /// Throws FormatError when absent.
    const torch::Tensor& tensor(const std::string& name) const;
    void put(const std::string& name, const torch::Tensor& t);

    /// Stores every named parameter and buffer of `m` under `prefix`.
    void put_module(const std::string& prefix, const torch::nn::Module& m);
    /// Copies stored values into `m`. Throws FormatError on missing names
    /// or shape differences.
    void load_module(const std::string& prefix, torch::nn::Module& m) const;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws BadMagicError, TruncatedError or FormatError.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pastnet
