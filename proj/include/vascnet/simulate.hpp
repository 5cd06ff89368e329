#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vascnet/diagnostics.hpp"
#include "vascnet/solver.hpp"

namespace vascnet {

/// Diagnostic sampling control. period <= 0 records every step.
struct ObserverConfig {
    double period = 0.25;
    std::function<void(const State&)> callback;
};

/// Time series and metadata of one solver run. Gap columns measure distance
/// from the steady profile; energy columns follow the dissipation ledger.
/// residual/dissipation entries live on intervals (one fewer than samples).
struct RunReport {
    std::vector<double> t;
    std::vector<double> gap_rho, gap_m, gap_phi, gap_total;
    std::vector<double> mass;
    std::vector<double> energy_value, energy_kinetic, energy_internal, energy_field,
        energy_coupling;
    std::vector<double> dissipation_pred; // per interval
    std::vector<double> energy_residual;  // per interval
    std::vector<double> dt_history;
    std::map<std::string, std::string> metadata;
    std::optional<double> fitted_decay_rate;
};

namespace detail {

inline void record_sample(RunReport& rep, const State& s, const SteadyProfile& profile,
                          const PressureLaw& law, const ModelParams& params,
                          const State* prev_sample) {
    const auto gap = sup_norm_gap(s, profile);
    rep.t.push_back(s.t);
    rep.gap_rho.push_back(gap.rho);
    rep.gap_m.push_back(gap.m);
    rep.gap_phi.push_back(gap.phi);
    rep.gap_total.push_back(gap.total);
    rep.mass.push_back(num::integrate_cells(s.rho, s.grid.dx()));
    const auto e = energy_functional(s, law, params, profile.rho_plus);
    rep.energy_value.push_back(e.value);
    rep.energy_kinetic.push_back(e.kinetic);
    rep.energy_internal.push_back(e.internal);
    rep.energy_field.push_back(e.field);
    rep.energy_coupling.push_back(e.coupling);
    if (prev_sample != nullptr) {
        const double d = dissipation_between(*prev_sample, s, params);
        rep.dissipation_pred.push_back(d);
        const std::size_t k = rep.energy_value.size() - 1;
        const double dfdt =
            (rep.energy_value[k] - rep.energy_value[k - 1]) / (s.t - prev_sample->t);
        rep.energy_residual.push_back(std::abs(dfdt + d));
    }
}

} // namespace detail

/// Advances the state to T_end with adaptive CFL steps, recording diagnostics
/// on the observer cadence. Steps are clipped so samples and T_end are hit
/// exactly; on a solver error the partial series is attached to the rethrown
/// report by the caller.
inline RunReport simulate(State state, double T_end, const SchemeConfig& cfg,
                          const PressureLaw& law, const ModelParams& params,
                          const SteadyProfile& profile, const ObserverConfig& obs = {}) {
    cfg.validate();
    state.validate();
    if (!(T_end > state.t)) throw InvalidInput("simulate: T_end must exceed the initial time");

    RunReport rep;
    rep.metadata["N"] = std::to_string(state.grid.cells());
    rep.metadata["L"] = std::to_string(state.grid.length());
    rep.metadata["dx"] = std::to_string(state.grid.dx());
    rep.metadata["cfl"] = std::to_string(cfg.cfl);
    rep.metadata["theta"] = std::to_string(cfg.diffusion_theta);
    rep.metadata["flux"] = "rusanov";

    State last_sample = state;
    detail::record_sample(rep, state, profile, law, params, nullptr);
    if (obs.callback) obs.callback(state);

    const bool every_step = obs.period <= 0.0;
    double next_sample = every_step ? 0.0 : state.t + obs.period;
    const double eps = 1e-12 * std::max(1.0, T_end);

    while (state.t < T_end - eps) {
        double dt = stable_dt(state, cfg, law, params);
        dt = std::min(dt, T_end - state.t);
        if (!every_step) dt = std::min(dt, next_sample - state.t);
        state = step(state, dt, cfg, law, params, profile);
        rep.dt_history.push_back(dt);

        const bool sample_due = every_step || state.t >= next_sample - eps ||
                                state.t >= T_end - eps;
        if (sample_due) {
            detail::record_sample(rep, state, profile, law, params, &last_sample);
            last_sample = state;
            if (obs.callback) obs.callback(state);
            if (!every_step)
                while (next_sample <= state.t + eps) next_sample += obs.period;
        }
    }
    return rep;
}

} // namespace vascnet
