// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic trajectory generators: bouncing glyphs, 2D incompressible
// Navier-Stokes in vorticity form on the unit torus, and 2D shallow water
// radial dam break on [-extent, extent]^2.

#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pastnet/dataset.hpp"

namespace pastnet::datagen {

/// Independent per-trajectory stream derived from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Bouncing glyphs

struct BounceConfig {
    std::int64_t frames = 20;
    std::int64_t height = 64;
    std::int64_t width = 64;
    std::int64_t n_glyphs = 2;
    std::int64_t glyph_scale = 3;  // 5x7 bitmap font, scaled
    double min_speed = 1.0;        // px / frame
    double max_speed = 3.0;

    std::vector<std::string> validate() const;
    nlohmann::json to_json() const;
};

/// One sprite's motion along a single axis with elastic reflection at 0 and
/// `limit`. Steps the position one frame at a time.
struct BounceAxis {
    double position;
    double velocity;
    double limit;

    void advance();
};

struct GlyphTrack {
    int glyph;  // 0..9
    BounceAxis x;
    BounceAxis y;
};

/// Binary sprite of a glyph (rows x cols, row-major, values 0/1).
struct Sprite {
    std::int64_t rows;
    std::int64_t cols;
    std::vector<float> pixels;
};

Sprite glyph_sprite(int glyph, std::int64_t scale);

/// Renders the tracks at their current positions into a single H x W frame,
/// combining overlaps with per-pixel max.
void render_glyphs(const std::vector<GlyphTrack>& tracks, std::int64_t scale, std::span<float> frame,
                   std::int64_t height, std::int64_t width);

/// Animates explicit tracks for `frames` frames, returning (frames, 1, H, W).
std::vector<float> animate(std::vector<GlyphTrack> tracks, const BounceConfig& cfg);

TrajectoryDataset gen_bouncing(std::int64_t n_seqs, const BounceConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Navier-Stokes (vorticity), pseudo-spectral

struct NseConfig {
    std::int64_t grid = 64;
    double viscosity = 1e-3;
    double forcing_amplitude = 0.1;  // f = A (sin 2pi k(x+y) + cos 2pi k(x+y))
    std::int64_t forcing_wavenumber = 1;
    double init_alpha = 2.5;  // initial spectrum ~ (4 pi^2 |k|^2 + tau^2)^(-alpha)
    double init_tau = 7.0;
    double dt_solver = 1e-3;
    double dt_record = 1.0;
    std::int64_t records = 20;  // frames kept, first one is t = 0
    bool probe_stability = true;

    std::vector<std::string> validate() const;
    nlohmann::json to_json() const;
};

/// Spectral state lives in real-to-complex layout: n x (n/2 + 1) modes.
class NseSolver {
public:
    using Complex = std::complex<double>;

    explicit NseSolver(const NseConfig& cfg);
    ~NseSolver();
    NseSolver(const NseSolver&) = delete;
    NseSolver& operator=(const NseSolver&) = delete;
    NseSolver(NseSolver&&) noexcept;
    NseSolver& operator=(NseSolver&&) noexcept;

    std::int64_t grid() const { return n_; }
    std::int64_t modes_y() const { return n_ / 2 + 1; }

    /// Sets the vorticity from a physical n x n field (projected onto the
    /// dealiased band).
    void set_vorticity(std::span<const double> w);
    /// Gaussian random field initial condition with zero mean.
    void randomize(std::uint64_t seed);
    void set_forcing(std::span<const double> f);

    /// One Crank-Nicolson / Heun step of size dt.
    void step(double dt);

    std::vector<double> vorticity() const;
    std::vector<double> forcing() const;
    const std::vector<Complex>& vorticity_hat() const { return w_hat_; }

    double mean_vorticity() const;
    double kinetic_energy() const;  // 0.5 * mean |u|^2
    double enstrophy() const;       // 0.5 * mean w^2

    /// 2/3-rule band mask in r2c layout.
    bool retained(std::int64_t kx_index, std::int64_t ky_index) const;

private:
    void nonlinear(const std::vector<Complex>& w_hat, std::vector<Complex>& out);
    void velocity(const std::vector<Complex>& w_hat, std::vector<double>& u, std::vector<double>& v);

    struct Plans;
    NseConfig cfg_;
    std::int64_t n_;
    std::vector<Complex> w_hat_;
    std::vector<Complex> f_hat_;
    std::unique_ptr<Plans> plans_;
};

/// Default forcing A (sin 2pi k(x+y) + cos 2pi k(x+y)) sampled at x_i = i/n.
std::vector<double> default_forcing(const NseConfig& cfg);

TrajectoryDataset simulate_nse(const NseConfig& cfg, std::int64_t n_trajectories, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Shallow water, finite volume with Rusanov flux

struct SweConfig {
    std::int64_t grid = 128;
    double extent = 2.5;  // domain [-extent, extent]^2
    double gravity = 1.0;
    double radius_min = 0.3;
    double radius_max = 0.7;
    double h_inner = 2.0;
    double h_outer = 1.0;
    double cfl = 0.4;
    double dt_record = 0.01;
    std::int64_t records = 100;

    std::vector<std::string> validate() const;
    nlohmann::json to_json() const;
};

/// Initial height: h_inner where sqrt(x^2 + y^2) < r, h_outer elsewhere.
double dam_break_height(double x, double y, double radius, double h_inner = 2.0, double h_outer = 1.0);

/// Conserved variables on an n x n cell grid, row-major with row = y index.
class SweSolver {
public:
    explicit SweSolver(const SweConfig& cfg);

    std::int64_t grid() const { return n_; }
    double cell_size() const { return dx_; }
    double cell_center(std::int64_t i) const;

    void set_dam_break(double radius);
    void set_state(std::vector<double> h, std::vector<double> hu, std::vector<double> hv);

    /// CFL-limited step, never longer than dt_max; returns the step taken.
    double step(double dt_max);
    double stable_dt() const;

    double total_mass() const;
    const std::vector<double>& h() const { return h_; }
    const std::vector<double>& hu() const { return hu_; }
    const std::vector<double>& hv() const { return hv_; }

private:
    SweConfig cfg_;
    std::int64_t n_;
    double dx_;
    std::vector<double> h_, hu_, hv_;
    std::vector<double> fx_[3], fy_[3];
};

TrajectoryDataset simulate_swe(const SweConfig& cfg, std::int64_t n_trajectories, std::uint64_t seed);

}  // namespace pastnet::datagen
