// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pseudo-spectral vorticity solver on the unit torus.
//
//   w_t + u . grad w = nu lap w + f,   u = (psi_y, -psi_x),   -lap psi = w
//
// The advection term is evaluated in conservative form div(u w) so its mean
// mode is exactly zero. All spectral products are confined to the 2/3 band:
// the state is kept band-limited and each product is truncated back to it.
// Time stepping is Crank-Nicolson on diffusion and Heun on advection/forcing.

#include <cmath>
#include <numbers>
#include <random>

#include <fftw3.h>

#include "pastnet/datagen.hpp"
#include "pastnet/error.hpp"

namespace pastnet::datagen {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t signed_wavenumber(std::int64_t i, std::int64_t n) { return i <= n / 2 ? i : i - n; }

}  // namespace

struct NseSolver::Plans {
    std::int64_t n;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Plans(std::int64_t n_) : n(n_) {
        const auto nn = static_cast<std::size_t>(n * n);
        const auto nh = static_cast<std::size_t>(n * (n / 2 + 1));
        real = static_cast<double*>(fftw_malloc(sizeof(double) * nn));
        spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nh));
        forward = fftw_plan_dft_r2c_2d(static_cast<int>(n), static_cast<int>(n), real, spec, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(static_cast<int>(n), static_cast<int>(n), spec, real, FFTW_ESTIMATE);
    }
    ~Plans() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spec);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;

    void r2c(const std::vector<double>& in, std::vector<Complex>& out) {
        std::copy(in.begin(), in.end(), real);
        fftw_execute(forward);
        out.resize(static_cast<std::size_t>(n * (n / 2 + 1)));
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec[k][0], spec[k][1]};
    }

    // Normalized inverse.
    void c2r(const std::vector<Complex>& in, std::vector<double>& out) {
        for (std::size_t k = 0; k < in.size(); ++k) {
            spec[k][0] = in[k].real();
            spec[k][1] = in[k].imag();
        }
        fftw_execute(backward);
        const double scale = 1.0 / static_cast<double>(n * n);
        out.resize(static_cast<std::size_t>(n * n));
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = real[k] * scale;
    }
};

std::vector<std::string> NseConfig::validate() const {
    std::vector<std::string> errs;
    if (grid < 4 || grid % 2 != 0) errs.push_back("nse_grid: must be even and >= 4");
    if (!(viscosity > 0.0)) errs.push_back("nse_viscosity: must be > 0");
    if (!(dt_solver > 0.0)) errs.push_back("nse_dt_solver: must be > 0");
    if (!(dt_record >= dt_solver)) errs.push_back("nse_dt_record: must be >= nse_dt_solver");
    if (records < 1) errs.push_back("nse_records: must be >= 1");
    if (!(init_tau > 0.0) || !(init_alpha > 1.0)) errs.push_back("nse_init: need tau > 0 and alpha > 1");
    if (forcing_wavenumber < 0) errs.push_back("nse_forcing_wavenumber: must be >= 0");
    return errs;
}

nlohmann::json NseConfig::to_json() const {
    return {{"grid", grid},
            {"viscosity", viscosity},
            {"forcing_amplitude", forcing_amplitude},
            {"forcing_wavenumber", forcing_wavenumber},
            {"init_alpha", init_alpha},
            {"init_tau", init_tau},
            {"dt_solver", dt_solver},
            {"dt_record", dt_record},
            {"records", records}};
}

namespace {

const NseConfig& checked(const NseConfig& cfg) {
    if (auto errs = cfg.validate(); !errs.empty()) throw ConfigError("nse config: " + errs.front());
    return cfg;
}

}  // namespace

NseSolver::NseSolver(const NseConfig& cfg)
    : cfg_(checked(cfg)), n_(cfg.grid), plans_(std::make_unique<Plans>(cfg.grid)) {
    w_hat_.assign(static_cast<std::size_t>(n_ * modes_y()), Complex{});
    f_hat_.assign(w_hat_.size(), Complex{});
}

NseSolver::~NseSolver() = default;
NseSolver::NseSolver(NseSolver&&) noexcept = default;
NseSolver& NseSolver::operator=(NseSolver&&) noexcept = default;

bool NseSolver::retained(std::int64_t kx_index, std::int64_t ky_index) const {
    const auto kmax = n_ / 3;
    return std::abs(signed_wavenumber(kx_index, n_)) <= kmax && ky_index <= kmax;
}

void NseSolver::set_vorticity(std::span<const double> w) {
    if (static_cast<std::int64_t>(w.size()) != n_ * n_) throw ShapeError("vorticity field must be n x n");
    plans_->r2c(std::vector<double>(w.begin(), w.end()), w_hat_);
    for (std::int64_t i = 0; i < n_; ++i)
        for (std::int64_t j = 0; j < modes_y(); ++j)
            if (!retained(i, j)) w_hat_[static_cast<std::size_t>(i * modes_y() + j)] = 0.0;
}

void NseSolver::set_forcing(std::span<const double> f) {
    if (static_cast<std::int64_t>(f.size()) != n_ * n_) throw ShapeError("forcing field must be n x n");
    plans_->r2c(std::vector<double>(f.begin(), f.end()), f_hat_);
    for (std::int64_t i = 0; i < n_; ++i)
        for (std::int64_t j = 0; j < modes_y(); ++j)
            if (!retained(i, j)) f_hat_[static_cast<std::size_t>(i * modes_y() + j)] = 0.0;
}

void NseSolver::randomize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(static_cast<std::size_t>(n_ * n_));
    for (auto& v : noise) v = normal(rng);
    std::vector<Complex> xi;
    plans_->r2c(noise, xi);

    const double sigma = std::pow(cfg_.init_tau, cfg_.init_alpha - 1.0);
    const double tau2 = cfg_.init_tau * cfg_.init_tau;
    for (std::int64_t i = 0; i < n_; ++i) {
        const double kx = static_cast<double>(signed_wavenumber(i, n_));
        for (std::int64_t j = 0; j < modes_y(); ++j) {
            const double ky = static_cast<double>(j);
            const auto idx = static_cast<std::size_t>(i * modes_y() + j);
            if ((i == 0 && j == 0) || !retained(i, j)) {
                xi[idx] = 0.0;
                continue;
            }
            const double lam = kTwoPi * kTwoPi * (kx * kx + ky * ky);
            xi[idx] *= static_cast<double>(n_) * 2.0 * sigma * std::pow(lam + tau2, -0.5 * cfg_.init_alpha);
        }
    }
    // Round-trip through physical space so the stored half-spectrum is the
    // exact r2c image of a real field.
    std::vector<double> w;
    plans_->c2r(xi, w);
    set_vorticity(w);
}

void NseSolver::velocity(const std::vector<Complex>& w_hat, std::vector<double>& u, std::vector<double>& v) {
    std::vector<Complex> u_hat(w_hat.size()), v_hat(w_hat.size());
    for (std::int64_t i = 0; i < n_; ++i) {
        const double kx = static_cast<double>(signed_wavenumber(i, n_));
        for (std::int64_t j = 0; j < modes_y(); ++j) {
            const double ky = static_cast<double>(j);
            const auto idx = static_cast<std::size_t>(i * modes_y() + j);
            const double k2 = kx * kx + ky * ky;
            if (k2 == 0.0) continue;
            const Complex psi = w_hat[idx] / (kTwoPi * kTwoPi * k2);
            u_hat[idx] = Complex(0.0, kTwoPi * ky) * psi;
            v_hat[idx] = Complex(0.0, -kTwoPi * kx) * psi;
        }
    }
    plans_->c2r(u_hat, u);
    plans_->c2r(v_hat, v);
}

void NseSolver::nonlinear(const std::vector<Complex>& w_hat, std::vector<Complex>& out) {
    std::vector<double> u, v, w;
    velocity(w_hat, u, v);
    plans_->c2r(w_hat, w);
    for (std::size_t k = 0; k < w.size(); ++k) {
        u[k] *= w[k];
        v[k] *= w[k];
    }
    std::vector<Complex> uw_hat, vw_hat;
    plans_->r2c(u, uw_hat);
    plans_->r2c(v, vw_hat);
    out.assign(w_hat.size(), Complex{});
    for (std::int64_t i = 0; i < n_; ++i) {
        const double kx = static_cast<double>(signed_wavenumber(i, n_));
        for (std::int64_t j = 0; j < modes_y(); ++j) {
            if (!retained(i, j)) continue;
            const double ky = static_cast<double>(j);
            const auto idx = static_cast<std::size_t>(i * modes_y() + j);
            out[idx] = Complex(0.0, kTwoPi * kx) * uw_hat[idx] + Complex(0.0, kTwoPi * ky) * vw_hat[idx];
        }
    }
}

void NseSolver::step(double dt) {
    std::vector<Complex> n0, n1;
    nonlinear(w_hat_, n0);

    const double nu = cfg_.viscosity;
    std::vector<Complex> predictor(w_hat_.size());
    for (std::int64_t i = 0; i < n_; ++i) {
        const double kx = static_cast<double>(signed_wavenumber(i, n_));
        for (std::int64_t j = 0; j < modes_y(); ++j) {
            const auto idx = static_cast<std::size_t>(i * modes_y() + j);
            if (!retained(i, j)) continue;
            const double ky = static_cast<double>(j);
            const double lap = -kTwoPi * kTwoPi * (kx * kx + ky * ky);
            predictor[idx] = (w_hat_[idx] + dt * (f_hat_[idx] - n0[idx] + 0.5 * nu * lap * w_hat_[idx])) /
                             (1.0 - 0.5 * dt * nu * lap);
        }
    }
    nonlinear(predictor, n1);
    for (std::int64_t i = 0; i < n_; ++i) {
        const double kx = static_cast<double>(signed_wavenumber(i, n_));
        for (std::int64_t j = 0; j < modes_y(); ++j) {
            const auto idx = static_cast<std::size_t>(i * modes_y() + j);
            if (!retained(i, j)) continue;
            const double ky = static_cast<double>(j);
            const double lap = -kTwoPi * kTwoPi * (kx * kx + ky * ky);
            w_hat_[idx] =
                (w_hat_[idx] + dt * (f_hat_[idx] - 0.5 * (n0[idx] + n1[idx]) + 0.5 * nu * lap * w_hat_[idx])) /
                (1.0 - 0.5 * dt * nu * lap);
        }
    }
}

std::vector<double> NseSolver::vorticity() const {
    std::vector<double> w;
    plans_->c2r(w_hat_, w);
    return w;
}

std::vector<double> NseSolver::forcing() const {
    std::vector<double> f;
    plans_->c2r(f_hat_, f);
    return f;
}

double NseSolver::mean_vorticity() const { return w_hat_[0].real() / static_cast<double>(n_ * n_); }

double NseSolver::kinetic_energy() const {
    std::vector<double> u, v;
    const_cast<NseSolver*>(this)->velocity(w_hat_, u, v);
    double e = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) e += u[k] * u[k] + v[k] * v[k];
    return 0.5 * e / static_cast<double>(u.size());
}

double NseSolver::enstrophy() const {
    const auto w = vorticity();
    double e = 0.0;
    for (double x : w) e += x * x;
    return 0.5 * e / static_cast<double>(w.size());
}

std::vector<double> default_forcing(const NseConfig& cfg) {
    const auto n = cfg.grid;
    std::vector<double> f(static_cast<std::size_t>(n * n));
    const double k = static_cast<double>(cfg.forcing_wavenumber);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            const double s = static_cast<double>(i + j) / static_cast<double>(n);
            f[static_cast<std::size_t>(i * n + j)] =
                cfg.forcing_amplitude * (std::sin(kTwoPi * k * s) + std::cos(kTwoPi * k * s));
        }
    }
    return f;
}

namespace {

void check_finite(const std::vector<double>& w, std::int64_t traj, double t) {
    for (double v : w) {
        if (!std::isfinite(v))
            throw NumericalError("nse: non-finite vorticity in trajectory " + std::to_string(traj) + " at t=" +
                                 std::to_string(t) + "; reduce nse_dt_solver");
    }
}

void advance_record(NseSolver& s, double dt_record, double dt) {
    const auto steps = static_cast<std::int64_t>(std::ceil(dt_record / dt - 1e-9));
    const double h = dt_record / static_cast<double>(steps);
    for (std::int64_t k = 0; k < steps; ++k) s.step(h);
}

}  // namespace

TrajectoryDataset simulate_nse(const NseConfig& cfg, std::int64_t n_trajectories, std::uint64_t seed) {
    if (auto errs = cfg.validate(); !errs.empty()) throw ConfigError("nse config: " + errs.front());
    if (n_trajectories < 1) throw ConfigError("nse: n_trajectories must be >= 1");
    const auto n = cfg.grid;
    const auto forcing = default_forcing(cfg);

    if (cfg.probe_stability) {
        // Step-halving probe over one record interval from the first initial state.
        NseSolver coarse(cfg), fine(cfg);
        coarse.randomize(derive_seed(seed, 0));
        fine.randomize(derive_seed(seed, 0));
        coarse.set_forcing(forcing);
        fine.set_forcing(forcing);
        advance_record(coarse, cfg.dt_record, cfg.dt_solver);
        advance_record(fine, cfg.dt_record, 0.5 * cfg.dt_solver);
        const auto a = coarse.vorticity();
        const auto b = fine.vorticity();
        double diff = 0.0, norm = 0.0;
        bool finite = true;
        for (std::size_t k = 0; k < a.size(); ++k) {
            finite = finite && std::isfinite(a[k]) && std::isfinite(b[k]);
            diff += (a[k] - b[k]) * (a[k] - b[k]);
            norm += b[k] * b[k];
        }
        if (!finite || diff > 1e-4 * std::max(norm, 1e-300))
            throw ConfigError("nse_dt_solver=" + std::to_string(cfg.dt_solver) + " is unstable or inaccurate on a " +
                              std::to_string(n) + "x" + std::to_string(n) + " grid (step-halving probe)");
    }

    TrajectoryDataset ds;
    ds.generator = "nse";
    ds.params = cfg.to_json();
    ds.seed = seed;
    ds.dt_record = cfg.dt_record;
    ds.resize({n_trajectories, cfg.records, 1, n, n});

    for (std::int64_t tr = 0; tr < n_trajectories; ++tr) {
        NseSolver solver(cfg);
        solver.randomize(derive_seed(seed, static_cast<std::uint64_t>(tr)));
        solver.set_forcing(forcing);
        for (std::int64_t r = 0; r < cfg.records; ++r) {
            if (r > 0) advance_record(solver, cfg.dt_record, cfg.dt_solver);
            const auto w = solver.vorticity();
            check_finite(w, tr, static_cast<double>(r) * cfg.dt_record);
            auto dst = ds.frames(tr, r, 1);
            for (std::size_t k = 0; k < w.size(); ++k) dst[k] = static_cast<float>(w[k]);
        }
    }
    return ds;
}

}  // namespace pastnet::datagen
