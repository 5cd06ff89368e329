#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "vascnet/errors.hpp"
#include "vascnet/grid.hpp"
#include "vascnet/model.hpp"
#include "vascnet/numerics.hpp"

namespace vascnet {

enum class ProfileDirection { Decreasing, Increasing };

/// The scalar functions driving the steady-state construction.
///
///   F(s)      = integral_{rho_plus}^{s} p'(t) / (mu t) dt
///   H(s)      = b F(s) + b phi_plus - a s
///   deltaG(s) = integral_{rho_plus}^{s} 2 F'(t) H(t) dt
///
/// F is strictly increasing with F' > a/b; H vanishes at rho_plus and shares
/// the sign of s - rho_plus; deltaG is positive away from rho_plus. Quadratic
/// pressure uses closed forms (F linear, deltaG quadratic); other laws use
/// adaptive quadrature with absolute tolerance 1e-12. deltaG avoids nested
/// quadrature through the identity
///   deltaG(s) = b F^2 + 2 b phi_plus F - 2 a s F
///               + 2 a integral_{rho_plus}^{s} (s - t) p'(t) / (mu t) dt.
class StationaryFunctions {
public:
    StationaryFunctions(PressureLaw law, ModelParams params, double rho_plus, double phi_plus)
        : law_(std::move(law)), params_(params), rho_plus_(rho_plus), phi_plus_(phi_plus) {
        if (!(rho_plus > 0.0)) throw InvalidInput("StationaryFunctions: rho_plus must be positive");
        quadratic_ = law_.kind() == PressureLaw::Kind::Quadratic;
    }

    StationaryFunctions(PressureLaw law, ModelParams params, const BoundaryData& bdry)
        : StationaryFunctions(std::move(law), params, bdry.rho_plus, bdry.phi_plus) {}

    double rho_plus() const noexcept { return rho_plus_; }
    double phi_plus() const noexcept { return phi_plus_; }
    const ModelParams& params() const noexcept { return params_; }
    const PressureLaw& law() const noexcept { return law_; }

    double F(double s) const {
        if (!(s > 0.0)) throw DomainError("F: density must be positive");
        if (quadratic_) return law_.K() / params_.mu * (s - rho_plus_);
        const auto f = [this](double t) { return law_.deriv(t) / (params_.mu * t); };
        return num::integrate_adaptive(f, rho_plus_, s, 1e-12);
    }

    double Fprime(double s) const {
        if (!(s > 0.0)) throw DomainError("Fprime: density must be positive");
        return law_.deriv(s) / (params_.mu * s);
    }

    double H(double s) const {
        return params_.b * F(s) + params_.b * phi_plus_ - params_.a * s;
    }

    /// G(s) - G(rho_plus), clamped to zero for roundoff values in (-1e-14, 0).
    double deltaG(double s) const {
        if (!(s > 0.0)) throw DomainError("deltaG: density must be positive");
        double g;
        if (quadratic_) {
            const double fp = law_.K() / params_.mu;
            const double d = s - rho_plus_;
            g = fp * (params_.b * fp - params_.a) * d * d;
        } else {
            const double Fs = F(s);
            const auto w = [this, s](double t) {
                return (s - t) * law_.deriv(t) / (params_.mu * t);
            };
            const double tail = num::integrate_adaptive(w, rho_plus_, s, 1e-12);
            g = params_.b * Fs * Fs + 2.0 * params_.b * phi_plus_ * Fs -
                2.0 * params_.a * s * Fs + 2.0 * params_.a * tail;
        }
        if (g < 0.0) {
            if (g > -1e-14) return 0.0;
            throw NumericalFailure("deltaG: significantly negative value, quadrature failure");
        }
        return g;
    }

    /// One-sided limit of the profile slope magnitude at rho_plus:
    /// sqrt((b F'(rho_plus) - a) / F'(rho_plus)). Valid for any admissible law
    /// and used for domain-truncation estimates and slope checks.
    double lipschitz_rate() const {
        const double fp = Fprime(rho_plus_);
        const double v = (params_.b * fp - params_.a) / fp;
        if (!(v > 0.0)) throw NumericalFailure("lipschitz_rate: structural condition violated");
        return std::sqrt(v);
    }

private:
    PressureLaw law_;
    ModelParams params_;
    double rho_plus_;
    double phi_plus_;
    bool quadratic_;
};

inline double eval_F(const StationaryFunctions& fns, double s) { return fns.F(s); }
inline double eval_H(const StationaryFunctions& fns, double s) { return fns.H(s); }
inline double delta_G(const StationaryFunctions& fns, double s) { return fns.deltaG(s); }

/// Unique density intercept rho_minus with F(rho_minus) = target. Brackets by
/// doubling away from rho_plus, then refines with guarded secant/bisection to
/// |F - target| <= 1e-12.
inline double solve_rho_minus(const StationaryFunctions& fns, double target) {
    const double rp = fns.rho_plus();
    if (target == 0.0) return rp;

    double lo = rp, hi = rp;
    double f_lo = -target, f_hi = -target; // F(rho_plus) - target
    bool bracketed = false;
    if (target > 0.0) {
        double step = rp;
        for (int k = 0; k < 60; ++k) {
            lo = hi;
            f_lo = f_hi;
            hi = rp + step;
            f_hi = fns.F(hi) - target;
            if (f_hi >= 0.0) {
                bracketed = true;
                break;
            }
            step *= 2.0;
        }
    } else {
        double factor = 0.5;
        for (int k = 0; k < 60; ++k) {
            hi = lo;
            f_hi = f_lo;
            lo = rp * factor;
            f_lo = fns.F(lo) - target;
            if (f_lo <= 0.0) {
                bracketed = true;
                break;
            }
            factor *= 0.5;
        }
    }
    if (!bracketed)
        throw InfeasibleBoundaryData(
            "solve_rho_minus: F never reaches phi_minus - phi_plus; boundary data violates "
            "the feasibility condition");

    const auto g = [&](double s) { return fns.F(s) - target; };
    const auto r = num::solve_bracketed(g, lo, hi, f_lo, f_hi, 1e-12, 300);
    if (std::abs(r.residual) > 1e-12)
        throw NumericalFailure("solve_rho_minus: root refinement stalled");
    return r.x;
}

inline double solve_rho_minus(const StationaryFunctions& fns, const BoundaryData& bdry) {
    return solve_rho_minus(fns, bdry.delta_phi());
}

/// Slope of the steady density profile at density rho, from the first
/// integral [F'(rho) rho_x]^2 = deltaG(rho):
///   rho_x = -sqrt(deltaG)/F'  (decreasing),  +sqrt(deltaG)/F' (increasing).
/// Exactly zero at rho = rho_plus.
inline double steady_rhs(const StationaryFunctions& fns, double rho, double rho_minus,
                         ProfileDirection direction) {
    const double rp = fns.rho_plus();
    const double lo = std::min(rp, rho_minus);
    const double hi = std::max(rp, rho_minus);
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    if (rho < lo - slack || rho > hi + slack)
        throw DomainError("steady_rhs: density outside [rho_plus, rho_minus]");
    const double clamped = std::clamp(rho, lo, hi);
    if (clamped == rp) return 0.0;
    const double mag = std::sqrt(fns.deltaG(clamped)) / fns.Fprime(clamped);
    return direction == ProfileDirection::Decreasing ? -mag : mag;
}

/// Discretized steady state. Profile values are sampled twice from the same
/// integration pass: at nodes x_j = j dx (rho_bar/phi_bar, carrying the
/// boundary values rho_bar[0] = rho_minus and phi_bar[0] = phi_minus) and at
/// cell centers (rho_cell/phi_cell) for use by the finite-volume solver.
struct SteadyProfile {
    HalfLineGrid grid;
    std::vector<double> rho_bar;  // nodes, size grid.nodes()
    std::vector<double> phi_bar;  // nodes
    std::vector<double> rho_cell; // cell centers, size grid.cells()
    std::vector<double> phi_cell; // cell centers
    double rho_minus = 0.0;
    double rho_plus = 0.0;
    double phi_plus = 0.0;
    double phi_wall = 0.0; // phi_minus
    double lambda_fit = 0.0;
    ProfileDirection direction = ProfileDirection::Decreasing;

    /// Far-field clamp values at x = L.
    double rho_right() const { return rho_bar.back(); }
    double phi_right() const { return phi_bar.back(); }
};

/// Fitted exponential rate of |rho_bar - rho_plus|, least squares over the
/// window where the gap lies in [1e-8, 1e-2] * |rho_minus - rho_plus|.
inline double estimate_decay_rate(const SteadyProfile& profile) {
    const double span = std::abs(profile.rho_minus - profile.rho_plus);
    if (!(span > 0.0)) throw WindowTooShort("estimate_decay_rate: constant profile");
    double min_gap = std::numeric_limits<double>::infinity();
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < profile.rho_bar.size(); ++j) {
        const double gap = std::abs(profile.rho_bar[j] - profile.rho_plus);
        min_gap = std::min(min_gap, gap);
        if (gap >= 1e-8 * span && gap <= 1e-2 * span) {
            xs.push_back(profile.grid.node(j));
            ys.push_back(std::log(gap));
        }
    }
    if (min_gap > 1e-3 * span)
        throw WindowTooShort("estimate_decay_rate: profile gap never decays below 1e-3 of span");
    if (xs.size() < 5)
        throw WindowTooShort("estimate_decay_rate: fewer than 5 points in the fit window");
    const double rate = -num::linear_slope(xs, ys);
    if (!(rate > 0.0)) throw NumericalFailure("estimate_decay_rate: non-positive rate");
    return rate;
}

/// Integrates the profile ODE rho_x = steady_rhs(rho) from rho(0) = rho_minus
/// with classical RK4 at a fixed sub-step (default dx/10), sampling nodes and
/// cell centers on the way, and reconstructs phi_bar = F(rho_bar) + phi_plus.
inline SteadyProfile compute_steady_profile(const StationaryFunctions& fns,
                                            const BoundaryData& bdry, const HalfLineGrid& grid,
                                            double sub_step = 0.0) {
    const double lambda_est = fns.lipschitz_rate();
    if (lambda_est * grid.length() < 13.8)
        throw InvalidInput("compute_steady_profile: grid length too short for far-field "
                           "truncation (need exp(-lambda L) <= 1e-6)");

    const double rho_minus = solve_rho_minus(fns, bdry);
    const auto direction = bdry.delta_phi() > 0.0 ? ProfileDirection::Decreasing
                                                  : ProfileDirection::Increasing;
    const double rp = fns.rho_plus();
    const double lo = std::min(rp, rho_minus);
    const double hi = std::max(rp, rho_minus);

    // March in half-cell segments so nodes and centers are hit exactly.
    const double dx = grid.dx();
    const double h_req = sub_step > 0.0 ? sub_step : dx / 10.0;
    const std::size_t n_sub = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((0.5 * dx) / h_req)));
    const double h = (0.5 * dx) / static_cast<double>(n_sub);

    const auto rhs = [&](double rho) {
        const double r = std::clamp(rho, lo, hi);
        if (r == rp) return 0.0;
        const double mag = std::sqrt(fns.deltaG(r)) / fns.Fprime(r);
        return direction == ProfileDirection::Decreasing ? -mag : mag;
    };

    SteadyProfile profile{grid, {}, {}, {}, {}, rho_minus, rp, fns.phi_plus(),
                          bdry.phi_minus, 0.0, direction};
    profile.rho_bar.reserve(grid.nodes());
    profile.rho_cell.reserve(grid.cells());

    double rho = rho_minus;
    profile.rho_bar.push_back(rho);
    for (std::size_t seg = 0; seg < 2 * grid.cells(); ++seg) {
        for (std::size_t k = 0; k < n_sub; ++k) rho = num::rk4_step(rhs, rho, h);
        rho = std::clamp(rho, lo, hi);
        if (seg % 2 == 0)
            profile.rho_cell.push_back(rho);
        else
            profile.rho_bar.push_back(rho);
    }

    const auto monotone_ok = [&](const std::vector<double>& v) {
        for (std::size_t j = 1; j < v.size(); ++j) {
            if (direction == ProfileDirection::Decreasing ? v[j] >= v[j - 1]
                                                          : v[j] <= v[j - 1])
                return false;
        }
        return true;
    };
    if (!monotone_ok(profile.rho_bar) || !monotone_ok(profile.rho_cell))
        throw NumericalFailure("compute_steady_profile: integrated profile lost strict "
                               "monotonicity");

    profile.phi_bar.resize(profile.rho_bar.size());
    for (std::size_t j = 0; j < profile.rho_bar.size(); ++j)
        profile.phi_bar[j] = fns.F(profile.rho_bar[j]) + fns.phi_plus();
    profile.phi_cell.resize(profile.rho_cell.size());
    for (std::size_t i = 0; i < profile.rho_cell.size(); ++i)
        profile.phi_cell[i] = fns.F(profile.rho_cell[i]) + fns.phi_plus();

    profile.lambda_fit = estimate_decay_rate(profile);
    return profile;
}

struct SteadyResidual {
    double r1; // max |d/dx p(rho_bar) - mu rho_bar d/dx phi_bar|
    double r2; // max |d2/dx2 phi_bar + a rho_bar - b phi_bar|
};

/// Pointwise residuals of the original stationary system on interior nodes,
/// second-order central stencils. End nodes are reported as zero.
inline std::pair<std::vector<double>, std::vector<double>>
steady_residual_pointwise(const SteadyProfile& profile, const PressureLaw& law,
                          const ModelParams& params) {
    const auto& r = profile.rho_bar;
    const auto& f = profile.phi_bar;
    const std::size_t n = r.size();
    if (n < 5) throw InvalidInput("steady_residual: need at least 5 nodes");
    const double dx = profile.grid.dx();
    std::vector<double> r1(n, 0.0), r2(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double dp = (law.value(r[j + 1]) - law.value(r[j - 1])) / (2.0 * dx);
        const double dphi = (f[j + 1] - f[j - 1]) / (2.0 * dx);
        const double lap = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / (dx * dx);
        r1[j] = dp - params.mu * r[j] * dphi;
        r2[j] = lap + params.a * r[j] - params.b * f[j];
    }
    return {std::move(r1), std::move(r2)};
}

inline SteadyResidual steady_residual(const SteadyProfile& profile, const PressureLaw& law,
                                      const ModelParams& params) {
    const auto [r1, r2] = steady_residual_pointwise(profile, law, params);
    double m1 = 0.0, m2 = 0.0;
    for (double v : r1) m1 = std::max(m1, std::abs(v));
    for (double v : r2) m2 = std::max(m2, std::abs(v));
    return {m1, m2};
}

} // namespace vascnet
