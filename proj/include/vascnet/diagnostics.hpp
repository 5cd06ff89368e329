#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vascnet/errors.hpp"
#include "vascnet/model.hpp"
#include "vascnet/numerics.hpp"
#include "vascnet/solver.hpp"
#include "vascnet/steady.hpp"

namespace vascnet {

/// Perturbation variables around the steady profile:
///   varphi = -integral_x^inf (rho - rho_bar) dy   (density anti-derivative)
///   psi    = m
///   Phi    = phi - phi_bar
/// plus the compatibility time-derivatives of Phi at the initial time and the
/// total mass defect of the density perturbation.
struct PerturbationFields {
    std::vector<double> varphi;
    std::vector<double> psi;
    std::vector<double> Phi;
    std::vector<double> Phi_t0;
    std::vector<double> Phi_tt0;
    double mass_defect = 0.0;
};

inline PerturbationFields perturbation_fields(const State& state, const SteadyProfile& profile,
                                              const ModelParams& params) {
    if (!(state.grid == profile.grid))
        throw InvalidInput("perturbation_fields: state and profile grids differ");
    const std::size_t n = state.grid.cells();
    const double dx = state.grid.dx();

    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = state.rho[i] - profile.rho_cell[i];

    PerturbationFields out;
    out.varphi = num::cumulative_from_right(d, dx);
    for (double& v : out.varphi) v = -v;
    out.mass_defect = -out.varphi.front();
    out.psi = state.m;
    out.Phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.Phi[i] = state.phi[i] - profile.phi_cell[i];

    // Boundary ghosts consistent with the solver: Phi and Phi_t vanish at the
    // wall (Dirichlet phi(0) = phi_minus) and at the far clamp.
    const auto lap = [&](const std::vector<double>& f, std::size_t i) {
        const double left = i == 0 ? -f[0] : f[i - 1];
        const double right = i + 1 == n ? -f[n - 1] : f[i + 1];
        return (left - 2.0 * f[i] + right) / (dx * dx);
    };

    out.Phi_t0.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.Phi_t0[i] = lap(out.Phi, i) + params.a * d[i] - params.b * out.Phi[i];

    out.Phi_tt0.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m_l = i == 0 ? -state.m[0] : state.m[i - 1];
        const double m_r = i + 1 == n ? 0.0 : state.m[i + 1];
        const double dm = (m_r - m_l) / (2.0 * dx);
        out.Phi_tt0[i] = lap(out.Phi_t0, i) - params.a * dm - params.b * out.Phi_t0[i];
    }
    return out;
}

/// One sample of the energy functional
///   F[rho, u, phi] = 1/(2 mu) int rho u^2 + 1/mu int G(rho)
///                    + 1/(2a) int (phi_x^2 + b phi^2) - int rho phi
/// with the enthalpy G anchored at the reference density
/// (G(ref) = G'(ref) = 0, rho G''(rho) = p'(rho)).
struct EnergySample {
    double kinetic = 0.0;
    double internal = 0.0;
    double field = 0.0;
    double coupling = 0.0;
    double value = 0.0; // kinetic + internal + field + coupling
};

/// Anchored enthalpy G(rho) = int_ref^rho (rho - s) p'(s)/s ds; closed form
/// K (rho - ref)^2 / 2 for the quadratic law.
inline double enthalpy(const PressureLaw& law, double rho, double ref) {
    if (!(rho > 0.0)) throw VacuumError(static_cast<std::size_t>(-1), std::nan(""),
                                        "enthalpy: non-positive density");
    if (law.kind() == PressureLaw::Kind::Quadratic) {
        const double d = rho - ref;
        return 0.5 * law.K() * d * d;
    }
    const auto f = [&](double s) { return (rho - s) * law.deriv(s) / s; };
    return num::integrate_adaptive(f, ref, rho, 1e-12);
}

inline EnergySample energy_functional(const State& state, const PressureLaw& law,
                                      const ModelParams& params, double enthalpy_ref) {
    const std::size_t n = state.grid.cells();
    const double dx = state.grid.dx();
    std::vector<double> integrand(n);

    for (std::size_t i = 0; i < n; ++i) {
        if (!(state.rho[i] > 0.0))
            throw VacuumError(i, state.t, "energy_functional: vacuum");
        integrand[i] = state.m[i] * state.m[i] / state.rho[i];
    }
    EnergySample s;
    s.kinetic = num::integrate_cells(integrand, dx) / (2.0 * params.mu);

    for (std::size_t i = 0; i < n; ++i) integrand[i] = enthalpy(law, state.rho[i], enthalpy_ref);
    s.internal = num::integrate_cells(integrand, dx) / params.mu;

    for (std::size_t i = 0; i < n; ++i) {
        double dphi;
        if (i == 0)
            dphi = (-1.5 * state.phi[0] + 2.0 * state.phi[1] - 0.5 * state.phi[2]) / dx;
        else if (i + 1 == n)
            dphi = (1.5 * state.phi[n - 1] - 2.0 * state.phi[n - 2] + 0.5 * state.phi[n - 3]) / dx;
        else
            dphi = (state.phi[i + 1] - state.phi[i - 1]) / (2.0 * dx);
        integrand[i] = dphi * dphi + params.b * state.phi[i] * state.phi[i];
    }
    s.field = num::integrate_cells(integrand, dx) / (2.0 * params.a);

    for (std::size_t i = 0; i < n; ++i) integrand[i] = state.rho[i] * state.phi[i];
    s.coupling = -num::integrate_cells(integrand, dx);

    s.value = s.kinetic + s.internal + s.field + s.coupling;
    return s;
}

/// Predicted dissipation rate between two sampled states:
///   alpha/mu int rho u^2 (trapezoid in time) + 1/a int phi_t^2
/// with phi_t the difference quotient of the samples. Matches the difference
/// quotient of the energy functional in the continuum identity.
inline double dissipation_between(const State& earlier, const State& later,
                                  const ModelParams& params) {
    const std::size_t n = earlier.grid.cells();
    const double dx = earlier.grid.dx();
    const double dt = later.t - earlier.t;
    if (!(dt > 0.0)) throw InvalidInput("dissipation_between: samples not ordered in time");

    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i)
        integrand[i] = earlier.m[i] * earlier.m[i] / earlier.rho[i];
    const double ke0 = num::integrate_cells(integrand, dx);
    for (std::size_t i = 0; i < n; ++i) integrand[i] = later.m[i] * later.m[i] / later.rho[i];
    const double ke1 = num::integrate_cells(integrand, dx);

    for (std::size_t i = 0; i < n; ++i) {
        const double phit = (later.phi[i] - earlier.phi[i]) / dt;
        integrand[i] = phit * phit;
    }
    const double phit2 = num::integrate_cells(integrand, dx);

    return params.alpha / params.mu * 0.5 * (ke0 + ke1) + phit2 / params.a;
}

struct SupNormGap {
    double rho = 0.0;
    double m = 0.0;
    double phi = 0.0;
    double total = 0.0;
};

/// Per-field sup-norm distance from the steady profile (m against zero).
inline SupNormGap sup_norm_gap(const State& state, const SteadyProfile& profile) {
    if (!(state.grid == profile.grid))
        throw InvalidInput("sup_norm_gap: state and profile grids differ");
    SupNormGap g;
    for (std::size_t i = 0; i < state.rho.size(); ++i) {
        g.rho = std::max(g.rho, std::abs(state.rho[i] - profile.rho_cell[i]));
        g.m = std::max(g.m, std::abs(state.m[i]));
        g.phi = std::max(g.phi, std::abs(state.phi[i] - profile.phi_cell[i]));
    }
    g.total = std::max({g.rho, g.m, g.phi});
    return g;
}

struct HardyResult {
    double lhs;       // int e^{-kx} f^2
    double rhs;       // int f_x^2
    double witness;   // lhs / rhs (0 when both vanish)
    double constant;  // C_k = 4 sup e^{-kx} (1+x)^2
    bool holds;
};

/// Constructive constant of the weighted Hardy inequality; the supremum of
/// e^{-kx}(1+x)^2 sits at x = 2/k - 1 for k < 2 and at x = 0 otherwise.
inline double hardy_constant(double k) {
    if (!(k > 0.0)) throw InvalidInput("hardy_constant: k must be positive");
    if (k < 2.0) {
        const double x_star = 2.0 / k - 1.0;
        return 4.0 * std::exp(-k * x_star) * (1.0 + x_star) * (1.0 + x_star);
    }
    return 4.0;
}

/// Checks int e^{-kx} f^2 <= C_k int f_x^2 for a node-sampled f with f(0)=0.
/// Node samples start at x = 0 with spacing dx.
inline HardyResult hardy_check(std::span<const double> f, double k, double dx) {
    if (f.size() < 5) throw InvalidInput("hardy_check: need at least 5 samples");
    if (f[0] != 0.0) throw InvalidInput("hardy_check: f(0) must vanish");
    if (!(k > 0.0)) throw InvalidInput("hardy_check: k must be positive");

    const std::size_t n = f.size();
    std::vector<double> w(n), g(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = static_cast<double>(j) * dx;
        w[j] = std::exp(-k * x) * f[j] * f[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
        double fx;
        if (j == 0)
            fx = (-1.5 * f[0] + 2.0 * f[1] - 0.5 * f[2]) / dx;
        else if (j + 1 == n)
            fx = (1.5 * f[n - 1] - 2.0 * f[n - 2] + 0.5 * f[n - 3]) / dx;
        else
            fx = (f[j + 1] - f[j - 1]) / (2.0 * dx);
        g[j] = fx * fx;
    }
    HardyResult r{};
    r.lhs = num::trapezoid(w, dx);
    r.rhs = num::trapezoid(g, dx);
    r.constant = hardy_constant(k);
    r.witness = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    r.holds = r.lhs <= r.constant * r.rhs || (r.lhs == 0.0 && r.rhs == 0.0);
    return r;
}

/// Least-squares exponential decay rate of a positive series inside a time
/// window: slope of log(value) against t, negated.
inline double fit_exponential(std::span<const double> t, std::span<const double> value,
                              double window_lo, double window_hi) {
    if (t.size() != value.size()) throw InvalidInput("fit_exponential: size mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= window_lo && t[i] <= window_hi && value[i] > 0.0) {
            xs.push_back(t[i]);
            ys.push_back(std::log(value[i]));
        }
    }
    if (xs.size() < 5)
        throw WindowTooShort("fit_exponential: fewer than 5 positive points in window");
    return -num::linear_slope(xs, ys);
}

} // namespace vascnet
