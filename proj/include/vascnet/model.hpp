#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vascnet/errors.hpp"
#include "vascnet/numerics.hpp"

namespace vascnet {

/// Physical constants of the momentum-damped chemotaxis system:
/// mu   - chemotactic sensitivity (force term mu * rho * phi_x)
/// alpha- momentum drag coefficient
/// a    - chemoattractant production rate
/// b    - chemoattractant decay rate
struct ModelParams {
    double mu;
    double alpha;
    double a;
    double b;

    ModelParams(double mu_, double alpha_, double a_, double b_)
        : mu(mu_), alpha(alpha_), a(a_), b(b_) {
        if (!(mu > 0.0) || !(alpha > 0.0) || !(a > 0.0) || !(b > 0.0))
            throw InvalidInput("ModelParams: mu, alpha, a, b must all be positive");
    }
};

/// Wall and far-field boundary data. phi_plus is tied to rho_plus through
/// a * rho_plus = b * phi_plus; the factory computes it, the checked
/// constructor validates it to 1e-12 relative.
struct BoundaryData {
    double rho_plus;
    double phi_minus;
    double phi_plus;

    static BoundaryData from_wall_value(double rho_plus, double phi_minus,
                                        const ModelParams& p) {
        return BoundaryData(rho_plus, phi_minus, (p.a / p.b) * rho_plus, p);
    }

    BoundaryData(double rho_plus_, double phi_minus_, double phi_plus_,
                 const ModelParams& p)
        : rho_plus(rho_plus_), phi_minus(phi_minus_), phi_plus(phi_plus_) {
        if (!(rho_plus > 0.0)) throw InvalidInput("BoundaryData: rho_plus must be positive");
        if (!(phi_plus > 0.0)) throw InvalidInput("BoundaryData: phi_plus must be positive");
        const double rel = std::abs(p.a * rho_plus - p.b * phi_plus) /
                           std::max(std::abs(p.a * rho_plus), 1e-300);
        if (rel > 1e-12)
            throw InvalidInput("BoundaryData: a*rho_plus = b*phi_plus violated beyond 1e-12");
        if (phi_minus == phi_plus)
            throw InvalidInput("BoundaryData: phi_minus must differ from phi_plus");
    }

    double delta_phi() const noexcept { return phi_minus - phi_plus; }
};

/// Barotropic pressure law p(rho) with first and second derivatives.
///
/// Kinds:
///   Quadratic:  p = (K/2) rho^2
///   PowerLaw:   p = K rho^gamma, gamma >= 1  (note: not K rho^gamma / gamma)
///   Tabulated:  user callable returning {p, p', p''}
class PressureLaw {
public:
    enum class Kind { Quadratic, PowerLaw, Tabulated };
    using Evaluator = std::function<std::array<double, 3>(double)>;

    static PressureLaw quadratic(double K) {
        if (!(K > 0.0)) throw InvalidInput("PressureLaw: K must be positive");
        PressureLaw law;
        law.kind_ = Kind::Quadratic;
        law.K_ = K;
        return law;
    }

    static PressureLaw power_law(double K, double gamma) {
        if (!(K > 0.0)) throw InvalidInput("PressureLaw: K must be positive");
        if (!(gamma >= 1.0)) throw InvalidInput("PressureLaw: gamma must be >= 1");
        PressureLaw law;
        law.kind_ = Kind::PowerLaw;
        law.K_ = K;
        law.gamma_ = gamma;
        return law;
    }

    static PressureLaw tabulated(Evaluator eval) {
        if (!eval) throw InvalidInput("PressureLaw: tabulated law needs a callable");
        PressureLaw law;
        law.kind_ = Kind::Tabulated;
        law.eval_ = std::move(eval);
        return law;
    }

    Kind kind() const noexcept { return kind_; }
    double K() const noexcept { return K_; }
    double gamma() const noexcept { return gamma_; }

    /// p, p', p'' at a strictly positive density.
    std::array<double, 3> evaluate(double rho) const {
        if (!(rho > 0.0)) throw DomainError("pressure law: density must be positive");
        switch (kind_) {
        case Kind::Quadratic:
            return {0.5 * K_ * rho * rho, K_ * rho, K_};
        case Kind::PowerLaw:
            return {K_ * std::pow(rho, gamma_), K_ * gamma_ * std::pow(rho, gamma_ - 1.0),
                    K_ * gamma_ * (gamma_ - 1.0) * std::pow(rho, gamma_ - 2.0)};
        case Kind::Tabulated: {
            std::array<double, 3> v;
            try {
                v = eval_(rho);
            } catch (const std::exception& e) {
                throw LawEvaluationError(std::string("tabulated pressure law failed: ") + e.what());
            }
            if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2]))
                throw LawEvaluationError("tabulated pressure law returned a non-finite value");
            return v;
        }
        }
        throw NumericalFailure("PressureLaw: unreachable kind");
    }

    double value(double rho) const { return evaluate(rho)[0]; }
    double deriv(double rho) const { return evaluate(rho)[1]; }
    double second(double rho) const { return evaluate(rho)[2]; }

private:
    PressureLaw() = default;

    Kind kind_ = Kind::Quadratic;
    double K_ = 1.0;
    double gamma_ = 2.0;
    Evaluator eval_;
};

inline std::array<double, 3> pressure_eval(const PressureLaw& law, double rho) {
    return law.evaluate(rho);
}

/// Acoustic wave speed c = sqrt(p'(rho)). Throws when hyperbolicity is lost.
inline double sound_speed(const PressureLaw& law, double rho) {
    const double dp = law.deriv(rho);
    if (!(dp > 0.0)) throw HyperbolicityLoss("sound_speed: p'(rho) <= 0");
    return std::sqrt(dp);
}

/// One named check of the structural hypotheses, with the worst margin seen.
struct ValidationCheck {
    std::string name;
    bool passed;
    double margin; // +inf means "condition vacuous"
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Wall-integral of p'(s) / (mu s) from 0 to rho_plus, used by the boundary
/// feasibility condition. Divergence at s -> 0 is detected by probing the
/// integrand at 1e-8 * rho_plus; a divergent integral makes the condition
/// vacuous and is reported as +inf.
inline double feasibility_integral(const PressureLaw& law, const ModelParams& p,
                                   double rho_plus) {
    if (law.kind() == PressureLaw::Kind::Quadratic) return law.K() / p.mu * rho_plus;
    const double probe = 1e-8 * rho_plus;
    const double integrand_probe = law.deriv(probe) / (p.mu * probe);
    if (integrand_probe > 1e8) return std::numeric_limits<double>::infinity();
    const auto f = [&](double s) { return law.deriv(s) / (p.mu * s); };
    return num::integrate_adaptive(f, probe, rho_plus, 1e-12) + integrand_probe * probe;
}

/// Checks every structural hypothesis the steady-state construction needs:
///  (i)  p'(rho) - (a mu / b) rho > 0 at n log-spaced samples of `range`
///  (ii) a * rho_plus = b * phi_plus
///  (iii) phi_minus - phi_plus + integral_0^{rho_plus} p'(s)/(mu s) ds > 0
inline ValidationReport validate_model(const ModelParams& params, const PressureLaw& law,
                                       const BoundaryData& bdry,
                                       std::pair<double, double> range,
                                       std::size_t n_samples) {
    if (!(range.first > 0.0) || !(range.second > range.first))
        throw InvalidInput("validate_model: need 0 < rho_lo < rho_hi");
    if (n_samples < 2) throw InvalidInput("validate_model: need at least two samples");

    ValidationReport report;

    {
        const auto samples = num::log_spaced(range.first, range.second, n_samples);
        double worst = std::numeric_limits<double>::infinity();
        double worst_rho = samples.front();
        for (double rho : samples) {
            const double m = law.deriv(rho) - (params.a * params.mu / params.b) * rho;
            if (m < worst) {
                worst = m;
                worst_rho = rho;
            }
        }
        std::ostringstream os;
        os << "min over samples of p'(rho) - (a mu / b) rho, attained at rho = " << worst_rho;
        report.checks.push_back({"structural: p' - (a mu / b) rho > 0", worst > 0.0, worst, os.str()});
    }

    {
        const double rel = std::abs(params.a * bdry.rho_plus - params.b * bdry.phi_plus) /
                           std::max(std::abs(params.a * bdry.rho_plus), 1e-300);
        report.checks.push_back({"far field: a rho_plus = b phi_plus", rel <= 1e-12, rel,
                                 "relative mismatch of a rho_plus vs b phi_plus"});
    }

    {
        const double wall_integral = feasibility_integral(law, params, bdry.rho_plus);
        const double value = bdry.delta_phi() + wall_integral;
        const bool vacuous = std::isinf(wall_integral);
        std::ostringstream os;
        if (vacuous)
            os << "wall integral diverges: +inf, condition vacuous";
        else
            os << "phi_minus - phi_plus + integral = " << value;
        report.checks.push_back({"feasibility: phi gap plus wall integral > 0",
                                 vacuous || value > 0.0,
                                 vacuous ? std::numeric_limits<double>::infinity() : value,
                                 os.str()});
    }

    return report;
}

} // namespace vascnet
