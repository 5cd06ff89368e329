#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vascnet/diagnostics.hpp"
#include "vascnet/simulate.hpp"
#include "vascnet/solver.hpp"
#include "vascnet/steady.hpp"

namespace vascnet {

/// Full description of one stability run.
struct Scenario {
    ModelParams params;
    PressureLaw law;
    BoundaryData bdry;
    HalfLineGrid grid;
    SchemeConfig scheme;
    double amplitude = 1e-2;
    double sigma = 1.0;
    bool perturb_phi = false;
    unsigned seed = 0; // reserved for randomized perturbation shapes
    double T_end = 50.0;
    double sampling = 0.25;
};

struct Perturbation {
    std::vector<double> drho;
    std::vector<double> dm;
    std::vector<double> dphi;
};

/// Smooth compatible perturbation with zero total density mass:
///   drho = A d/dx [x^2 e^{-sigma x}] = A (2x - sigma x^2) e^{-sigma x}
///   dm   = A x e^{-sigma x}
///   dphi = 0, or A x^2 e^{-sigma x} when perturb_phi is set.
/// Every component vanishes at the wall, matching m(0)=0 and phi(0)=phi_minus.
inline Perturbation default_perturbation(double amplitude, double sigma,
                                         const HalfLineGrid& grid, bool perturb_phi = false) {
    if (!(amplitude >= 0.0)) throw InvalidInput("default_perturbation: amplitude must be >= 0");
    if (!(sigma > 0.0)) throw InvalidInput("default_perturbation: sigma must be positive");
    const std::size_t n = grid.cells();
    Perturbation p{std::vector<double>(n), std::vector<double>(n),
                   std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.center(i);
        const double e = std::exp(-sigma * x);
        p.drho[i] = amplitude * (2.0 * x - sigma * x * x) * e;
        p.dm[i] = amplitude * x * e;
        if (perturb_phi) p.dphi[i] = amplitude * x * x * e;
    }
    return p;
}

/// Outcome of a stability experiment. gap_series measures the perturbed run
/// against a lockstep unperturbed control run (the discrete realization of
/// the steady state), which isolates the perturbation decay from the O(dx)
/// offset between the exact profile and the scheme's own fixed point. The
/// embedded RunReport carries the conventional gap-to-profile series.
struct StabilityReport {
    double initial_gap = 0.0;
    double final_gap = 0.0;
    std::vector<double> t;
    std::vector<double> gap_series;
    RunReport run;
    std::optional<double> fitted_decay_rate;
    double mass_drift = 0.0;       // relative to initial mass
    double initial_energy_gap = 0.0; // |F[perturbed_0] - F[control_0]|
    std::map<std::string, std::string> metadata;
};

/// Builds the perturbed initial data on top of the computed steady profile,
/// verifies positivity, then advances perturbed and control states in
/// lockstep (shared dt = min of the two CFL limits) to T_end.
inline StabilityReport run_stability_experiment(const Scenario& scn) {
    scn.scheme.validate();
    const StationaryFunctions fns(scn.law, scn.params, scn.bdry);
    const SteadyProfile profile = compute_steady_profile(fns, scn.bdry, scn.grid);
    const Perturbation pert =
        default_perturbation(scn.amplitude, scn.sigma, scn.grid, scn.perturb_phi);

    State perturbed = state_from_profile(profile);
    for (std::size_t i = 0; i < scn.grid.cells(); ++i) {
        perturbed.rho[i] += pert.drho[i];
        perturbed.m[i] += pert.dm[i];
        perturbed.phi[i] += pert.dphi[i];
        if (!(perturbed.rho[i] > 0.0))
            throw PerturbationTooLarge(
                "run_stability_experiment: perturbation-too-large, initial density is not "
                "positive in cell " +
                std::to_string(i));
    }
    State control = state_from_profile(profile);

    StabilityReport rep;
    rep.metadata["N"] = std::to_string(scn.grid.cells());
    rep.metadata["L"] = std::to_string(scn.grid.length());
    rep.metadata["amplitude"] = std::to_string(scn.amplitude);
    rep.metadata["sigma"] = std::to_string(scn.sigma);
    rep.metadata["T_end"] = std::to_string(scn.T_end);
    rep.metadata["seed"] = std::to_string(scn.seed);

    const auto ctrl_gap = [&](const State& p, const State& c) {
        double g = 0.0;
        for (std::size_t i = 0; i < p.rho.size(); ++i) {
            g = std::max(g, std::abs(p.rho[i] - c.rho[i]));
            g = std::max(g, std::abs(p.m[i] - c.m[i]));
            g = std::max(g, std::abs(p.phi[i] - c.phi[i]));
        }
        return g;
    };

    State last_sample = perturbed;
    detail::record_sample(rep.run, perturbed, profile, scn.law, scn.params, nullptr);
    rep.t.push_back(0.0);
    rep.gap_series.push_back(ctrl_gap(perturbed, control));
    rep.initial_energy_gap =
        std::abs(energy_functional(perturbed, scn.law, scn.params, profile.rho_plus).value -
                 energy_functional(control, scn.law, scn.params, profile.rho_plus).value);

    const double eps = 1e-12 * std::max(1.0, scn.T_end);
    double next_sample = scn.sampling > 0.0 ? scn.sampling : 0.0;
    while (perturbed.t < scn.T_end - eps) {
        double dt = std::min(stable_dt(perturbed, scn.scheme, scn.law, scn.params),
                             stable_dt(control, scn.scheme, scn.law, scn.params));
        dt = std::min(dt, scn.T_end - perturbed.t);
        if (scn.sampling > 0.0) dt = std::min(dt, next_sample - perturbed.t);
        perturbed = step(perturbed, dt, scn.scheme, scn.law, scn.params, profile);
        control = step(control, dt, scn.scheme, scn.law, scn.params, profile);
        rep.run.dt_history.push_back(dt);

        const bool due = scn.sampling <= 0.0 || perturbed.t >= next_sample - eps ||
                         perturbed.t >= scn.T_end - eps;
        if (due) {
            detail::record_sample(rep.run, perturbed, profile, scn.law, scn.params,
                                  &last_sample);
            last_sample = perturbed;
            rep.t.push_back(perturbed.t);
            rep.gap_series.push_back(ctrl_gap(perturbed, control));
            if (scn.sampling > 0.0)
                while (next_sample <= perturbed.t + eps) next_sample += scn.sampling;
        }
    }

    rep.initial_gap = rep.gap_series.front();
    rep.final_gap = rep.gap_series.back();
    try {
        rep.fitted_decay_rate =
            fit_exponential(rep.t, rep.gap_series, 0.5 * scn.T_end, scn.T_end);
    } catch (const WindowTooShort&) {
        rep.fitted_decay_rate.reset();
    }
    rep.run.fitted_decay_rate = rep.fitted_decay_rate;

    double drift = 0.0;
    for (double m : rep.run.mass) drift = std::max(drift, std::abs(m - rep.run.mass.front()));
    rep.mass_drift = drift / std::abs(rep.run.mass.front());
    return rep;
}

struct RefinementStudy {
    std::vector<std::size_t> cells;
    std::vector<double> drifts;
    std::vector<double> ratios; // drift[l] / drift[l+1]
    std::vector<double> orders; // log2 of the ratios
};

/// Fixed-point drift measurement under grid refinement: the solver starts at
/// the steady profile and runs a fixed number of steps at each resolution.
/// First-order fluxes should give ratios near 2 (order near 1).
inline RefinementStudy refinement_study(const Scenario& scn, std::size_t levels,
                                        std::size_t n_steps = 1000) {
    if (levels < 3) throw InvalidInput("refinement_study: need at least 3 levels");
    RefinementStudy out;
    const StationaryFunctions fns(scn.law, scn.params, scn.bdry);
    for (std::size_t l = 0; l < levels; ++l) {
        const std::size_t n = scn.grid.cells() << l;
        const HalfLineGrid grid(scn.grid.length(), n);
        const SteadyProfile profile = compute_steady_profile(fns, scn.bdry, grid);
        State s = state_from_profile(profile);
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double dt = stable_dt(s, scn.scheme, scn.law, scn.params);
            s = step(s, dt, scn.scheme, scn.law, scn.params, profile);
        }
        out.cells.push_back(n);
        out.drifts.push_back(sup_norm_gap(s, profile).total);
    }
    for (std::size_t l = 0; l + 1 < out.drifts.size(); ++l) {
        out.ratios.push_back(out.drifts[l] / out.drifts[l + 1]);
        out.orders.push_back(std::log2(out.ratios.back()));
    }
    return out;
}

/// Standalone heat-equation mode for time-order studies of the theta scheme:
/// evolves phi_t = phi_xx + a rho_plus - b phi with frozen density and equal
/// Dirichlet values on both ends, against the single-mode exact solution
/// phi = phi_plus + e^{-(pi^2/L^2 + b) t} sin(pi x / L).
/// Returns the max-abs error at T for each requested dt.
inline std::vector<double> heat_mode_errors(double theta, const HalfLineGrid& grid,
                                            const ModelParams& params, double phi_plus,
                                            double T, const std::vector<double>& dts) {
    const std::size_t n = grid.cells();
    const double L = grid.length();
    const double k = std::acos(-1.0) / L;
    const double rho_plus = params.b * phi_plus / params.a;
    std::vector<double> rho(n, rho_plus);
    std::vector<double> errors;
    for (double dt : dts) {
        std::vector<double> phi(n);
        for (std::size_t i = 0; i < n; ++i)
            phi[i] = phi_plus + std::sin(k * grid.center(i));
        double t = 0.0;
        while (t < T - 1e-12) {
            const double h = std::min(dt, T - t);
            phi = diffusion_substep(phi, rho, h, theta, params, grid.dx(), phi_plus, phi_plus);
            t += h;
        }
        const double decay = std::exp(-(k * k + params.b) * T);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double exact = phi_plus + decay * std::sin(k * grid.center(i));
            err = std::max(err, std::abs(phi[i] - exact));
        }
        errors.push_back(err);
    }
    return errors;
}

} // namespace vascnet
