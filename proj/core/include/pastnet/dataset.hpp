// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Trajectory container: N trajectories of T frames, each (C, H, W), float32.
//
// On-disk layout:
//   "PSTJ1\n"
//   one UTF-8 JSON metadata line terminated by '\n'
//   raw C-order little-endian float32 payload, exactly 4*N*T*C*H*W bytes

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pastnet {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BadMagicError : public FormatError {
public:
    using FormatError::FormatError;
};

class TruncatedError : public FormatError {
public:
    TruncatedError(const std::string& what, std::uint64_t expected, std::uint64_t actual)
        : FormatError(what), expected_bytes(expected), actual_bytes(actual) {}
    std::uint64_t expected_bytes;
    std::uint64_t actual_bytes;
};

class ShapeMismatchError : public FormatError {
public:
    using FormatError::FormatError;
};

using Shape5 = std::array<std::int64_t, 5>;

struct TrajectoryDataset {
    std::string generator;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    double dt_record = 1.0;
    std::string split = "train";
    Shape5 shape{0, 0, 0, 0, 0};  // N, T, C, H, W
    std::vector<float> data;

    std::int64_t num_trajectories() const { return shape[0]; }
    std::int64_t num_frames() const { return shape[1]; }
    std::int64_t channels() const { return shape[2]; }
    std::int64_t height() const { return shape[3]; }
    std::int64_t width() const { return shape[4]; }
    std::int64_t frame_size() const { return shape[2] * shape[3] * shape[4]; }
    std::int64_t trajectory_size() const { return shape[1] * frame_size(); }
    std::int64_t numel() const { return shape[0] * trajectory_size(); }

    /// Frames [t0, t0 + count) of trajectory n, contiguous (count, C, H, W).
    std::span<const float> frames(std::int64_t n, std::int64_t t0, std::int64_t count) const;
    std::span<float> frames(std::int64_t n, std::int64_t t0, std::int64_t count);

    /// Allocates zeroed storage for the given shape.
    void resize(const Shape5& s);

    nlohmann::json metadata() const;
};

inline constexpr char kTrajectoryMagic[] = "PSTJ1\n";

void write_dataset(const TrajectoryDataset& ds, const std::filesystem::path& path);
TrajectoryDataset read_dataset(const std::filesystem::path& path);

/// In-memory variants used by the file functions.
std::string encode_dataset(const TrajectoryDataset& ds);
TrajectoryDataset decode_dataset(const std::string& bytes);

}  // namespace pastnet
