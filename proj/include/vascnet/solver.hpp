#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "vascnet/errors.hpp"
#include "vascnet/grid.hpp"
#include "vascnet/model.hpp"
#include "vascnet/numerics.hpp"
#include "vascnet/steady.hpp"

namespace vascnet {

/// Cell-averaged conserved fields (rho, m, phi) at one time level.
/// No-vacuum invariant: rho > 0 in every cell.
struct State {
    HalfLineGrid grid;
    std::vector<double> rho;
    std::vector<double> m;
    std::vector<double> phi;
    double t = 0.0;

    void validate() const {
        const std::size_t n = grid.cells();
        if (rho.size() != n || m.size() != n || phi.size() != n)
            throw InvalidInput("State: arrays must have one entry per cell");
        for (std::size_t i = 0; i < n; ++i)
            if (!(rho[i] > 0.0))
                throw VacuumError(i, t, "State: non-positive density in cell " + std::to_string(i));
    }
};

enum class FluxKind { Rusanov };

struct SchemeConfig {
    double cfl = 0.45;
    FluxKind flux = FluxKind::Rusanov;
    double diffusion_theta = 1.0; // 1.0 backward Euler, 0.5 Crank-Nicolson

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidInput("SchemeConfig: cfl must be in (0,1]");
        if (diffusion_theta != 0.5 && diffusion_theta != 1.0)
            throw InvalidInput("SchemeConfig: theta must be 0.5 or 1.0");
    }
};

/// Rusanov (local Lax-Friedrichs) flux for the (rho, m) subsystem with
/// physical flux f(U) = (m, m^2/rho + p(rho)). Consistent: equal states
/// return the exact physical flux.
inline std::pair<double, double> hyperbolic_flux(std::pair<double, double> left,
                                                 std::pair<double, double> right,
                                                 const PressureLaw& law) {
    const auto [rho_l, m_l] = left;
    const auto [rho_r, m_r] = right;
    if (!(rho_l > 0.0) || !(rho_r > 0.0))
        throw VacuumError(static_cast<std::size_t>(-1), std::nan(""),
                          "hyperbolic_flux: non-positive density");
    const double c_l = std::sqrt(law.deriv(rho_l));
    const double c_r = std::sqrt(law.deriv(rho_r));
    const double s = std::max(std::abs(m_l / rho_l) + c_l, std::abs(m_r / rho_r) + c_r);
    const double f_rho_l = m_l;
    const double f_rho_r = m_r;
    const double f_m_l = m_l * m_l / rho_l + law.value(rho_l);
    const double f_m_r = m_r * m_r / rho_r + law.value(rho_r);
    return {0.5 * (f_rho_l + f_rho_r) - 0.5 * s * (rho_r - rho_l),
            0.5 * (f_m_l + f_m_r) - 0.5 * s * (m_r - m_l)};
}

/// CFL-limited time step, additionally capped by the explicit source
/// stability margins 0.9/alpha and 0.9/b.
inline double stable_dt(const State& state, const SchemeConfig& cfg, const PressureLaw& law,
                        const ModelParams& params) {
    double s_max = 0.0;
    for (std::size_t i = 0; i < state.rho.size(); ++i) {
        const double c = std::sqrt(law.deriv(state.rho[i]));
        s_max = std::max(s_max, std::abs(state.m[i] / state.rho[i]) + c);
    }
    if (!(s_max > 0.0)) throw NumericalFailure("stable_dt: vanishing wave speed");
    double dt = cfg.cfl * state.grid.dx() / s_max;
    dt = std::min(dt, 0.9 / params.alpha);
    dt = std::min(dt, 0.9 / params.b);
    return dt;
}

/// One theta-scheme substep of phi_t = phi_xx + a rho - b phi with Dirichlet
/// values phi_wall at x=0 and phi_right at x=L imposed through ghost cells.
/// rho is the already-updated density field.
inline std::vector<double> diffusion_substep(const std::vector<double>& phi,
                                             const std::vector<double>& rho, double dt,
                                             double theta, const ModelParams& params, double dx,
                                             double phi_wall, double phi_right) {
    const std::size_t n = phi.size();
    const double idx2 = 1.0 / (dx * dx);

    // Explicit part: (1/dt) phi - (1-theta) [b phi - Lap(phi)] + a rho.
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i == 0 ? 2.0 * phi_wall - phi[0] : phi[i - 1];
        const double right = i + 1 == n ? 2.0 * phi_right - phi[n - 1] : phi[i + 1];
        const double lap = (left - 2.0 * phi[i] + right) * idx2;
        rhs[i] = phi[i] / dt - (1.0 - theta) * (params.b * phi[i] - lap) + params.a * rho[i];
    }
    // Implicit part constants from the ghost folding.
    rhs[0] += theta * 2.0 * phi_wall * idx2;
    rhs[n - 1] += theta * 2.0 * phi_right * idx2;

    std::vector<double> lower(n, -theta * idx2), upper(n, -theta * idx2), diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = (i == 0 || i + 1 == n) ? 3.0 : 2.0;
        diag[i] = 1.0 / dt + theta * (params.b + c * idx2);
    }
    num::solve_tridiagonal(lower, diag, upper, rhs);
    return rhs;
}

/// One full IMEX update:
///   1. finite-volume Rusanov update of (rho, m); reflecting wall ghost
///      (rho_1, -m_1) at x=0, Dirichlet ghost (rho_bar(L), 0) at x=L
///   2. explicit momentum sources mu rho phi_x - alpha m with pre-step phi
///   3. implicit theta-scheme solve for phi with the updated density.
inline State step(const State& state, double dt, const SchemeConfig& cfg,
                  const PressureLaw& law, const ModelParams& params,
                  const SteadyProfile& profile) {
    const std::size_t n = state.grid.cells();
    if (state.rho.size() != n || state.m.size() != n || state.phi.size() != n)
        throw InvalidInput("step: state arrays inconsistent with grid");
    if (!(dt > 0.0)) throw InvalidInput("step: dt must be positive");
    if (dt > stable_dt(state, cfg, law, params) * (1.0 + 1e-12))
        throw InvalidInput("step: dt exceeds stable_dt (CFL contract violated)");

    const double dx = state.grid.dx();
    const double rho_right = profile.rho_right();
    const double phi_right = profile.phi_right();

    // Interface fluxes, ghosts folded in at the two ends.
    std::vector<double> flux_rho(n + 1), flux_m(n + 1);
    {
        const std::pair<double, double> wall_ghost{state.rho[0], -state.m[0]};
        auto f = hyperbolic_flux(wall_ghost, {state.rho[0], state.m[0]}, law);
        flux_rho[0] = f.first;
        flux_m[0] = f.second;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            f = hyperbolic_flux({state.rho[i], state.m[i]}, {state.rho[i + 1], state.m[i + 1]},
                                law);
            flux_rho[i + 1] = f.first;
            flux_m[i + 1] = f.second;
        }
        f = hyperbolic_flux({state.rho[n - 1], state.m[n - 1]}, {rho_right, 0.0}, law);
        flux_rho[n] = f.first;
        flux_m[n] = f.second;
    }

    State next{state.grid, std::vector<double>(n), std::vector<double>(n),
               std::vector<double>(n), state.t + dt};
    const double lam = dt / dx;
    for (std::size_t i = 0; i < n; ++i) {
        next.rho[i] = state.rho[i] - lam * (flux_rho[i + 1] - flux_rho[i]);
        next.m[i] = state.m[i] - lam * (flux_m[i + 1] - flux_m[i]);
        if (!(next.rho[i] > 0.0))
            throw VacuumError(i, next.t,
                              "step: vacuum in cell " + std::to_string(i) + " at t = " +
                                  std::to_string(next.t));
    }

    // Momentum sources with pre-step phi (central gradient, boundary ghosts).
    for (std::size_t i = 0; i < n; ++i) {
        const double phi_l = i == 0 ? 2.0 * profile.phi_wall - state.phi[0] : state.phi[i - 1];
        const double phi_r = i + 1 == n ? 2.0 * phi_right - state.phi[n - 1] : state.phi[i + 1];
        const double dphi = (phi_r - phi_l) / (2.0 * dx);
        next.m[i] += dt * (params.mu * next.rho[i] * dphi - params.alpha * next.m[i]);
    }

    next.phi = diffusion_substep(state.phi, next.rho, dt, cfg.diffusion_theta, params, dx,
                                 profile.phi_wall, phi_right);
    return next;
}

/// State initialized from the steady profile itself (the discrete fixed-point
/// reference: rho = rho_bar, m = 0, phi = phi_bar at cell centers).
inline State state_from_profile(const SteadyProfile& profile) {
    return State{profile.grid, profile.rho_cell, std::vector<double>(profile.grid.cells(), 0.0),
                 profile.phi_cell, 0.0};
}

} // namespace vascnet
