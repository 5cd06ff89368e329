#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vascnet/errors.hpp"
#include "vascnet/experiments.hpp"
#include "vascnet/model.hpp"
#include "vascnet/solver.hpp"

namespace vascnet {

/// Parsed union of the configuration sections. Numeric validity is enforced
/// at parse time; defaults are applied only for [grid], [scheme] and
/// [experiment].
struct CliConfig {
    // [model]
    double mu = 0.0, alpha = 0.0, a = 0.0, b = 0.0;
    // [boundary]
    double rho_plus = 0.0, phi_minus = 0.0;
    // [pressure]
    std::string pressure_kind; // "quadratic" | "powerlaw"
    double K = 0.0;
    double gamma = 2.0;
    // [grid]
    double L = 40.0;
    std::size_t N = 2000;
    // [scheme]
    double cfl = 0.45;
    double theta = 1.0;
    // [experiment]
    double amplitude = 1e-2;
    double sigma = 1.0;
    double T_end = 50.0;
    double sampling = 0.25;
    bool perturb_phi = false;

    ModelParams make_params() const { return ModelParams(mu, alpha, a, b); }

    PressureLaw make_law() const {
        if (pressure_kind == "quadratic") return PressureLaw::quadratic(K);
        return PressureLaw::power_law(K, gamma);
    }

    BoundaryData make_boundary() const {
        return BoundaryData::from_wall_value(rho_plus, phi_minus, make_params());
    }

    HalfLineGrid make_grid() const { return HalfLineGrid(L, N); }

    SchemeConfig make_scheme() const {
        SchemeConfig s;
        s.cfl = cfl;
        s.diffusion_theta = theta;
        return s;
    }

    Scenario make_scenario() const {
        return Scenario{make_params(), make_law(),  make_boundary(), make_grid(),
                        make_scheme(), amplitude,   sigma,           perturb_phi,
                        0u,            T_end,       sampling};
    }
};

namespace detail {

struct RawEntry {
    std::string value;
    int line;
};

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace detail

/// Parses a sectioned key = value document. Collects every problem it finds
/// (syntax with line numbers, unknown keys, bad values, violated positivity)
/// and reports them together in one ParseError.
inline CliConfig parse_config(const std::string& text) {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"model", {"mu", "alpha", "a", "b"}},
        {"boundary", {"rho_plus", "phi_minus"}},
        {"pressure", {"kind", "K", "gamma"}},
        {"grid", {"L", "N"}},
        {"scheme", {"cfl", "theta"}},
        {"experiment", {"amplitude", "sigma", "T_end", "sampling", "perturb_phi"}},
    };

    std::vector<std::string> errors;
    std::map<std::string, std::map<std::string, detail::RawEntry>> entries;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": unterminated section header");
                continue;
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            if (!schema.count(section))
                errors.push_back("line " + std::to_string(lineno) + ": unknown section '" +
                                 section + "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": key '" + key +
                             "' outside any section");
            continue;
        }
        const auto it = schema.find(section);
        if (it != schema.end() && !it->second.count(key)) {
            errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + key +
                             "' in [" + section + "]");
            continue;
        }
        if (entries[section].count(key))
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key +
                             "' in [" + section + "]");
        entries[section][key] = {value, lineno};
    }

    CliConfig cfg;

    const auto get_double = [&](const std::string& sec, const std::string& key, double& dst,
                                bool required, bool positive) {
        const auto sit = entries.find(sec);
        const auto eit = sit == entries.end() ? decltype(sit->second.end())()
                                              : sit->second.find(key);
        if (sit == entries.end() || eit == sit->second.end()) {
            if (required) errors.push_back("missing required key '" + key + "' in [" + sec + "]");
            return;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(eit->second.value, &used);
            if (used != eit->second.value.size()) throw std::invalid_argument("trailing text");
            if (positive && !(v > 0.0)) {
                errors.push_back("key '" + key + "' in [" + sec + "] must be positive (line " +
                                 std::to_string(eit->second.line) + ")");
                return;
            }
            dst = v;
        } catch (const std::exception&) {
            errors.push_back("key '" + key + "' in [" + sec + "] is not a number (line " +
                             std::to_string(eit->second.line) + ")");
        }
    };

    get_double("model", "mu", cfg.mu, true, true);
    get_double("model", "alpha", cfg.alpha, true, true);
    get_double("model", "a", cfg.a, true, true);
    get_double("model", "b", cfg.b, true, true);
    get_double("boundary", "rho_plus", cfg.rho_plus, true, true);
    get_double("boundary", "phi_minus", cfg.phi_minus, true, false);
    get_double("pressure", "K", cfg.K, true, true);
    get_double("grid", "L", cfg.L, false, true);
    get_double("scheme", "cfl", cfg.cfl, false, true);
    get_double("scheme", "theta", cfg.theta, false, true);
    get_double("experiment", "sigma", cfg.sigma, false, true);
    get_double("experiment", "T_end", cfg.T_end, false, true);
    get_double("experiment", "sampling", cfg.sampling, false, false);

    double amplitude = cfg.amplitude;
    get_double("experiment", "amplitude", amplitude, false, false);
    if (amplitude < 0.0)
        errors.push_back("key 'amplitude' in [experiment] must be >= 0");
    else
        cfg.amplitude = amplitude;

    if (entries.count("pressure") && entries["pressure"].count("kind")) {
        const auto& e = entries["pressure"]["kind"];
        if (e.value == "quadratic" || e.value == "powerlaw") {
            cfg.pressure_kind = e.value;
        } else {
            errors.push_back("key 'kind' in [pressure] must be 'quadratic' or 'powerlaw' (line " +
                             std::to_string(e.line) + ")");
        }
    } else {
        errors.push_back("missing required key 'kind' in [pressure]");
    }
    if (cfg.pressure_kind == "powerlaw") {
        if (entries.count("pressure") && entries["pressure"].count("gamma")) {
            get_double("pressure", "gamma", cfg.gamma, false, true);
            if (cfg.gamma < 1.0) errors.push_back("key 'gamma' in [pressure] must be >= 1");
        } else {
            errors.push_back("missing required key 'gamma' in [pressure] for kind = powerlaw");
        }
    }

    if (entries.count("grid") && entries["grid"].count("N")) {
        const auto& e = entries["grid"]["N"];
        try {
            std::size_t used = 0;
            const long v = std::stol(e.value, &used);
            if (used != e.value.size()) throw std::invalid_argument("trailing text");
            if (v < 16)
                errors.push_back("key 'N' in [grid] must be >= 16 (line " +
                                 std::to_string(e.line) + ")");
            else
                cfg.N = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            errors.push_back("key 'N' in [grid] is not an integer (line " +
                             std::to_string(e.line) + ")");
        }
    }

    if (entries.count("experiment") && entries["experiment"].count("perturb_phi")) {
        const auto& e = entries["experiment"]["perturb_phi"];
        if (e.value == "true" || e.value == "1")
            cfg.perturb_phi = true;
        else if (e.value == "false" || e.value == "0")
            cfg.perturb_phi = false;
        else
            errors.push_back("key 'perturb_phi' in [experiment] must be true/false (line " +
                             std::to_string(e.line) + ")");
    }

    if (cfg.theta != 0.5 && cfg.theta != 1.0)
        errors.push_back("key 'theta' in [scheme] must be 0.5 or 1.0");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0))
        errors.push_back("key 'cfl' in [scheme] must be in (0, 1]");
    if (errors.empty() && cfg.b > 0.0 && cfg.a > 0.0 && cfg.rho_plus > 0.0) {
        const double phi_plus = cfg.a / cfg.b * cfg.rho_plus;
        if (cfg.phi_minus == phi_plus)
            errors.push_back("phi_minus equals the derived phi_plus = (a/b) rho_plus; the "
                             "boundary data must be a genuine phase transition");
    }

    if (!errors.empty()) {
        std::ostringstream os;
        os << "configuration has " << errors.size() << " problem(s):";
        for (const auto& e : errors) os << "\n  - " << e;
        throw ParseError(os.str());
    }
    return cfg;
}

} // namespace vascnet
