// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "pastnet/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "pastnet/error.hpp"

namespace pastnet {

static_assert(std::endian::native == std::endian::little, "payload is written in native order");

namespace {

constexpr std::size_t kMagicLen = sizeof(kTrajectoryMagic) - 1;

void check_shape(const Shape5& s) {
    for (auto v : s) {
        if (v <= 0) throw ShapeMismatchError("dataset shape entries must be positive");
    }
}

}  // namespace

std::span<const float> TrajectoryDataset::frames(std::int64_t n, std::int64_t t0, std::int64_t count) const {
    if (n < 0 || n >= shape[0] || t0 < 0 || count < 0 || t0 + count > shape[1])
        throw std::out_of_range("trajectory frame range out of bounds");
    return {data.data() + n * trajectory_size() + t0 * frame_size(), static_cast<std::size_t>(count * frame_size())};
}

std::span<float> TrajectoryDataset::frames(std::int64_t n, std::int64_t t0, std::int64_t count) {
    auto c = std::as_const(*this).frames(n, t0, count);
    return {const_cast<float*>(c.data()), c.size()};
}

void TrajectoryDataset::resize(const Shape5& s) {
    check_shape(s);
    shape = s;
    data.assign(static_cast<std::size_t>(numel()), 0.0f);
}

nlohmann::json TrajectoryDataset::metadata() const {
    return {
        {"generator", generator},
        {"params", params},
        {"seed", seed},
        {"dt_record", dt_record},
        {"split", split},
        {"dtype", "f32"},
        {"shape", shape},
        {"byte_order", "LE"},
    };
}

std::string encode_dataset(const TrajectoryDataset& ds) {
    check_shape(ds.shape);
    if (static_cast<std::int64_t>(ds.data.size()) != ds.numel())
        throw ShapeMismatchError("dataset payload holds " + std::to_string(ds.data.size()) + " values, shape implies " +
                                 std::to_string(ds.numel()));
    for (float v : ds.data) {
        if (!std::isfinite(v)) throw NumericalError("dataset contains non-finite values");
    }
    std::string out(kTrajectoryMagic, kMagicLen);
    out += ds.metadata().dump();
    out += '\n';
    const auto* bytes = reinterpret_cast<const char*>(ds.data.data());
    out.append(bytes, ds.data.size() * sizeof(float));
    return out;
}

TrajectoryDataset decode_dataset(const std::string& bytes) {
    if (bytes.size() < kMagicLen || std::memcmp(bytes.data(), kTrajectoryMagic, kMagicLen) != 0)
        throw BadMagicError("bad magic: not a PSTJ1 trajectory file");
    const auto eol = bytes.find('\n', kMagicLen);
    if (eol == std::string::npos) throw TruncatedError("truncated metadata line", 0, 0);

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(bytes.begin() + kMagicLen, bytes.begin() + static_cast<std::ptrdiff_t>(eol));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed metadata: ") + e.what());
    }

    TrajectoryDataset ds;
    try {
        if (meta.at("dtype") != "f32") throw FormatError("unsupported dtype " + meta.at("dtype").dump());
        if (meta.at("byte_order") != "LE") throw FormatError("unsupported byte order " + meta.at("byte_order").dump());
        const auto shape = meta.at("shape");
        if (!shape.is_array() || shape.size() != 5) throw ShapeMismatchError("shape must have 5 entries");
        for (std::size_t i = 0; i < 5; ++i) ds.shape[i] = shape[i].get<std::int64_t>();
        ds.generator = meta.at("generator").get<std::string>();
        ds.params = meta.at("params");
        ds.seed = meta.at("seed").get<std::uint64_t>();
        ds.dt_record = meta.value("dt_record", 1.0);
        ds.split = meta.value("split", std::string("train"));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed metadata: ") + e.what());
    }
    check_shape(ds.shape);

    const std::uint64_t expected = static_cast<std::uint64_t>(ds.numel()) * sizeof(float);
    const std::uint64_t actual = bytes.size() - eol - 1;
    if (actual < expected)
        throw TruncatedError("truncated payload: expected " + std::to_string(expected) + " bytes, found " +
                                 std::to_string(actual),
                             expected, actual);
    if (actual > expected)
        throw ShapeMismatchError("payload byte count " + std::to_string(actual) + " exceeds shape-implied " +
                                 std::to_string(expected));
    ds.data.resize(static_cast<std::size_t>(ds.numel()));
    std::memcpy(ds.data.data(), bytes.data() + eol + 1, expected);
    return ds;
}

void write_dataset(const TrajectoryDataset& ds, const std::filesystem::path& path) {
    const std::string bytes = encode_dataset(ds);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

TrajectoryDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_dataset(ss.str());
}

}  // namespace pastnet
