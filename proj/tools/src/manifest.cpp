// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "manifest.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <openssl/evp.h>

namespace pastnet::cli {

namespace {

struct MdCtx {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

    MdCtx() {
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256: digest init failed");
    }
    void update(const void* data, std::size_t n) {
        if (EVP_DigestUpdate(ctx.get(), data, n) != 1) throw std::runtime_error("sha256: digest update failed");
    }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw std::runtime_error("sha256: digest final failed");
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 15];
        }
        return out;
    }
};

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    MdCtx md;
    md.update(bytes.data(), bytes.size());
    return md.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    MdCtx md;
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) md.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return md.hex();
}

Manifest::Manifest(std::string command, const std::vector<std::string>& args) {
    j_["tool"] = "pastnet";
    j_["version"] = PASTNET_VERSION;
    j_["command"] = std::move(command);
    j_["args"] = args;
    j_["started_utc"] = utc_now();
    j_["inputs"] = nlohmann::json::array();
    j_["outputs"] = nlohmann::json::array();
}

void Manifest::config(const nlohmann::json& cfg, const std::string& hash) {
    j_["config"] = cfg;
    j_["config_sha256"] = hash;
}

void Manifest::input(const std::filesystem::path& p) {
    j_["inputs"].push_back(
        {{"path", p.string()}, {"bytes", std::filesystem::file_size(p)}, {"sha256", sha256_file(p)}});
}

void Manifest::output(const std::filesystem::path& p) {
    j_["outputs"].push_back(
        {{"path", p.string()}, {"bytes", std::filesystem::file_size(p)}, {"sha256", sha256_file(p)}});
}

std::filesystem::path Manifest::write_beside(const std::filesystem::path& target) const {
    const auto path = std::filesystem::is_directory(target) ? target / "manifest.json"
                                                            : std::filesystem::path(target.string() + ".manifest.json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j_.dump(2) << '\n';
    return path;
}

}  // namespace pastnet::cli
