// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run manifest: what a command read, what it wrote and with which settings.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pastnet::cli {

std::string sha256_hex(std::string_view bytes);
/// Streams the file; throws std::runtime_error when it cannot be read.
std::string sha256_file(const std::filesystem::path& path);

class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& args);

    void config(const nlohmann::json& cfg, const std::string& hash);
    void seed(std::uint64_t s) { j_["seed"] = s; }
    void input(const std::filesystem::path& p);
    void output(const std::filesystem::path& p);
    void set(const std::string& key, nlohmann::json value) { j_[key] = std::move(value); }

    /// Writes `<target>.manifest.json`, or `<target>/manifest.json` for a directory.
    std::filesystem::path write_beside(const std::filesystem::path& target) const;

    const nlohmann::json& json() const { return j_; }

private:
    nlohmann::json j_;
};

}  // namespace pastnet::cli
