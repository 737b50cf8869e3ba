// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// First-order finite-volume shallow water solver.
//
// Conserved state U = (h, hu, hv) on cell centers, local Lax-Friedrichs
// (Rusanov) interface fluxes, reflective walls through mirrored ghost cells,
// flat bathymetry. The flux expressions are written so that a mirror or a
// transpose of the state maps to the same floating-point operations.

#include <algorithm>
#include <cmath>
#include <random>

#include "pastnet/datagen.hpp"
#include "pastnet/error.hpp"

namespace pastnet::datagen {

namespace {

struct Cell {
    double h, hu, hv;
};

// Normal flux of cell state in the direction where `un` is the normal and
// `ut` the tangential momentum. Returns (mass, normal momentum, tangential).
struct Flux {
    double mass, normal, tangential;
};

Flux physical_flux(double h, double qn, double qt, double g) {
    return {qn, qn * qn / h + 0.5 * g * h * h, qn * qt / h};
}

Flux rusanov(double hl, double qnl, double qtl, double hr, double qnr, double qtr, double g) {
    const double al = std::abs(qnl / hl) + std::sqrt(g * hl);
    const double ar = std::abs(qnr / hr) + std::sqrt(g * hr);
    const double a = std::max(al, ar);
    const Flux fl = physical_flux(hl, qnl, qtl, g);
    const Flux fr = physical_flux(hr, qnr, qtr, g);
    return {0.5 * (fl.mass + fr.mass) - 0.5 * a * (hr - hl),
            0.5 * (fl.normal + fr.normal) - 0.5 * a * (qnr - qnl),
            0.5 * (fl.tangential + fr.tangential) - 0.5 * a * (qtr - qtl)};
}

}  // namespace

std::vector<std::string> SweConfig::validate() const {
    std::vector<std::string> errs;
    if (grid < 2) errs.push_back("swe_grid: must be >= 2");
    if (!(extent > 0.0)) errs.push_back("swe_extent: must be > 0");
    if (!(gravity > 0.0)) errs.push_back("swe_gravity: must be > 0");
    if (!(radius_min > 0.0) || !(radius_max >= radius_min)) errs.push_back("swe_radius: need 0 < min <= max");
    if (!(h_inner > 0.0) || !(h_outer > 0.0)) errs.push_back("swe_height: initial heights must be > 0");
    if (!(cfl > 0.0) || cfl > 0.5) errs.push_back("swe_cfl: must be in (0, 0.5]");
    if (!(dt_record > 0.0)) errs.push_back("swe_dt_record: must be > 0");
    if (records < 1) errs.push_back("swe_records: must be >= 1");
    return errs;
}

nlohmann::json SweConfig::to_json() const {
    return {{"grid", grid},           {"extent", extent},         {"gravity", gravity},
            {"radius_min", radius_min}, {"radius_max", radius_max}, {"h_inner", h_inner},
            {"h_outer", h_outer},     {"cfl", cfl},               {"dt_record", dt_record},
            {"records", records}};
}

double dam_break_height(double x, double y, double radius, double h_inner, double h_outer) {
    return std::sqrt(x * x + y * y) < radius ? h_inner : h_outer;
}

SweSolver::SweSolver(const SweConfig& cfg) : cfg_(cfg), n_(cfg.grid), dx_(0.0) {
    if (auto errs = cfg.validate(); !errs.empty()) throw ConfigError("swe config: " + errs.front());
    dx_ = 2.0 * cfg.extent / static_cast<double>(n_);
    const auto cells = static_cast<std::size_t>(n_ * n_);
    h_.assign(cells, cfg.h_outer);
    hu_.assign(cells, 0.0);
    hv_.assign(cells, 0.0);
    for (auto& f : fx_) f.assign(static_cast<std::size_t>(n_ * (n_ + 1)), 0.0);
    for (auto& f : fy_) f.assign(static_cast<std::size_t>((n_ + 1) * n_), 0.0);
}

double SweSolver::cell_center(std::int64_t i) const {
    return -cfg_.extent + (static_cast<double>(i) + 0.5) * dx_;
}

void SweSolver::set_dam_break(double radius) {
    for (std::int64_t i = 0; i < n_; ++i) {
        for (std::int64_t j = 0; j < n_; ++j) {
            const auto k = static_cast<std::size_t>(i * n_ + j);
            h_[k] = dam_break_height(cell_center(j), cell_center(i), radius, cfg_.h_inner, cfg_.h_outer);
            hu_[k] = 0.0;
            hv_[k] = 0.0;
        }
    }
}

void SweSolver::set_state(std::vector<double> h, std::vector<double> hu, std::vector<double> hv) {
    const auto cells = static_cast<std::size_t>(n_ * n_);
    if (h.size() != cells || hu.size() != cells || hv.size() != cells)
        throw ShapeError("swe state arrays must be n x n");
    h_ = std::move(h);
    hu_ = std::move(hu);
    hv_ = std::move(hv);
}

double SweSolver::stable_dt() const {
    double smax = 0.0;
    for (std::size_t k = 0; k < h_.size(); ++k) {
        const double c = std::sqrt(cfg_.gravity * h_[k]);
        smax = std::max({smax, std::abs(hu_[k] / h_[k]) + c, std::abs(hv_[k] / h_[k]) + c});
    }
    return cfg_.cfl * dx_ / smax;
}

double SweSolver::step(double dt_max) {
    const double g = cfg_.gravity;
    const double dt = std::min(dt_max, stable_dt());
    const auto n = n_;
    auto at = [n](std::int64_t i, std::int64_t j) { return static_cast<std::size_t>(i * n + j); };

    // x-interfaces: row i, interface j sits between cells j-1 and j.
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j <= n; ++j) {
            Cell l, r;
            if (j == 0) {
                const auto c = at(i, 0);
                r = {h_[c], hu_[c], hv_[c]};
                l = {r.h, -r.hu, r.hv};
            } else if (j == n) {
                const auto c = at(i, n - 1);
                l = {h_[c], hu_[c], hv_[c]};
                r = {l.h, -l.hu, l.hv};
            } else {
                const auto cl = at(i, j - 1), cr = at(i, j);
                l = {h_[cl], hu_[cl], hv_[cl]};
                r = {h_[cr], hu_[cr], hv_[cr]};
            }
            const Flux f = rusanov(l.h, l.hu, l.hv, r.h, r.hu, r.hv, g);
            const auto k = static_cast<std::size_t>(i * (n + 1) + j);
            fx_[0][k] = f.mass;
            fx_[1][k] = f.normal;
            fx_[2][k] = f.tangential;
        }
    }
    // y-interfaces: column j, interface i sits between cells i-1 and i.
    for (std::int64_t i = 0; i <= n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            Cell l, r;
            if (i == 0) {
                const auto c = at(0, j);
                r = {h_[c], hu_[c], hv_[c]};
                l = {r.h, r.hu, -r.hv};
            } else if (i == n) {
                const auto c = at(n - 1, j);
                l = {h_[c], hu_[c], hv_[c]};
                r = {l.h, l.hu, -l.hv};
            } else {
                const auto cl = at(i - 1, j), cr = at(i, j);
                l = {h_[cl], hu_[cl], hv_[cl]};
                r = {h_[cr], hu_[cr], hv_[cr]};
            }
            const Flux f = rusanov(l.h, l.hv, l.hu, r.h, r.hv, r.hu, g);
            const auto k = static_cast<std::size_t>(j * (n + 1) + i);
            fy_[0][k] = f.mass;
            fy_[1][k] = f.tangential;  // hu
            fy_[2][k] = f.normal;      // hv
        }
    }

    const double lambda = dt / dx_;
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            const auto c = at(i, j);
            const auto xw = static_cast<std::size_t>(i * (n + 1) + j);
            const auto ys = static_cast<std::size_t>(j * (n + 1) + i);
            h_[c] -= lambda * ((fx_[0][xw + 1] - fx_[0][xw]) + (fy_[0][ys + 1] - fy_[0][ys]));
            hu_[c] -= lambda * ((fx_[1][xw + 1] - fx_[1][xw]) + (fy_[1][ys + 1] - fy_[1][ys]));
            hv_[c] -= lambda * ((fx_[2][xw + 1] - fx_[2][xw]) + (fy_[2][ys + 1] - fy_[2][ys]));
        }
    }
    for (std::size_t k = 0; k < h_.size(); ++k) {
        if (!(h_[k] > 0.0))
            throw NumericalError("swe: non-positive depth h=" + std::to_string(h_[k]) + " at cell " +
                                 std::to_string(k) + "; lower swe_cfl");
    }
    return dt;
}

double SweSolver::total_mass() const {
    double m = 0.0;
    for (double v : h_) m += v;
    return m * dx_ * dx_;
}

TrajectoryDataset simulate_swe(const SweConfig& cfg, std::int64_t n_trajectories, std::uint64_t seed) {
    if (auto errs = cfg.validate(); !errs.empty()) throw ConfigError("swe config: " + errs.front());
    if (n_trajectories < 1) throw ConfigError("swe: n_trajectories must be >= 1");
    const auto n = cfg.grid;

    TrajectoryDataset ds;
    ds.generator = "swe";
    ds.seed = seed;
    ds.dt_record = cfg.dt_record;
    ds.resize({n_trajectories, cfg.records, 3, n, n});

    nlohmann::json radii = nlohmann::json::array();
    for (std::int64_t tr = 0; tr < n_trajectories; ++tr) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(tr)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double radius = cfg.radius_min + unit(rng) * (cfg.radius_max - cfg.radius_min);
        radii.push_back(radius);

        SweSolver solver(cfg);
        solver.set_dam_break(radius);
        for (std::int64_t r = 0; r < cfg.records; ++r) {
            if (r > 0) {
                double remaining = cfg.dt_record;
                while (remaining > 1e-12 * cfg.dt_record) remaining -= solver.step(remaining);
            }
            auto dst = ds.frames(tr, r, 1);
            const auto cells = static_cast<std::size_t>(n * n);
            for (std::size_t k = 0; k < cells; ++k) {
                dst[k] = static_cast<float>(solver.h()[k]);
                dst[cells + k] = static_cast<float>(solver.hu()[k]);
                dst[2 * cells + k] = static_cast<float>(solver.hv()[k]);
            }
        }
    }
    ds.params = cfg.to_json();
    ds.params["radii"] = radii;
    return ds;
}

}  // namespace pastnet::datagen
