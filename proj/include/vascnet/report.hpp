#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vascnet/errors.hpp"
#include "vascnet/experiments.hpp"
#include "vascnet/simulate.hpp"
#include "vascnet/version.hpp"

namespace vascnet {

namespace detail {

inline nlohmann::json run_to_json(const RunReport& r) {
    nlohmann::json j;
    j["t"] = r.t;
    j["gap_rho"] = r.gap_rho;
    j["gap_m"] = r.gap_m;
    j["gap_phi"] = r.gap_phi;
    j["gap_total"] = r.gap_total;
    j["mass"] = r.mass;
    j["energy_value"] = r.energy_value;
    j["energy_kinetic"] = r.energy_kinetic;
    j["energy_internal"] = r.energy_internal;
    j["energy_field"] = r.energy_field;
    j["energy_coupling"] = r.energy_coupling;
    j["dissipation_pred"] = r.dissipation_pred;
    j["energy_residual"] = r.energy_residual;
    j["dt_history"] = r.dt_history;
    j["metadata"] = r.metadata;
    if (r.fitted_decay_rate)
        j["fitted_decay_rate"] = *r.fitted_decay_rate;
    else
        j["fitted_decay_rate"] = nullptr;
    return j;
}

inline RunReport run_from_json(const nlohmann::json& j) {
    RunReport r;
    j.at("t").get_to(r.t);
    j.at("gap_rho").get_to(r.gap_rho);
    j.at("gap_m").get_to(r.gap_m);
    j.at("gap_phi").get_to(r.gap_phi);
    j.at("gap_total").get_to(r.gap_total);
    j.at("mass").get_to(r.mass);
    j.at("energy_value").get_to(r.energy_value);
    j.at("energy_kinetic").get_to(r.energy_kinetic);
    j.at("energy_internal").get_to(r.energy_internal);
    j.at("energy_field").get_to(r.energy_field);
    j.at("energy_coupling").get_to(r.energy_coupling);
    j.at("dissipation_pred").get_to(r.dissipation_pred);
    j.at("energy_residual").get_to(r.energy_residual);
    j.at("dt_history").get_to(r.dt_history);
    j.at("metadata").get_to(r.metadata);
    if (!j.at("fitted_decay_rate").is_null())
        r.fitted_decay_rate = j.at("fitted_decay_rate").get<double>();
    return r;
}

} // namespace detail

/// Serializes a stability report as a commented JSON document: '#' header
/// lines carrying tool id and config hash, then the JSON body.
inline std::string report_to_string(const StabilityReport& rep,
                                    const std::string& config_hash = "") {
    nlohmann::json j;
    j["format"] = "vascnet-report";
    j["version"] = kReportVersion;
    j["tool"] = tool_id();
    j["kind"] = "stability";
    j["initial_gap"] = rep.initial_gap;
    j["final_gap"] = rep.final_gap;
    j["t"] = rep.t;
    j["gap_series"] = rep.gap_series;
    if (rep.fitted_decay_rate)
        j["fitted_decay_rate"] = *rep.fitted_decay_rate;
    else
        j["fitted_decay_rate"] = nullptr;
    j["mass_drift"] = rep.mass_drift;
    j["initial_energy_gap"] = rep.initial_energy_gap;
    j["metadata"] = rep.metadata;
    j["run"] = detail::run_to_json(rep.run);

    std::ostringstream os;
    os << "# " << tool_id() << " stability report\n";
    if (!config_hash.empty()) os << "# config_hash=" << config_hash << "\n";
    os << j.dump(2) << "\n";
    return os.str();
}

inline StabilityReport report_from_string(const std::string& text) {
    // Drop leading comment lines, remember how many we skipped for error
    // positions.
    std::size_t pos = 0;
    std::size_t skipped_lines = 0;
    while (pos < text.size() && text[pos] == '#') {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            pos = text.size();
            break;
        }
        pos = nl + 1;
        ++skipped_lines;
    }

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text.substr(pos));
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = skipped_lines + 1;
        for (std::size_t i = pos; i < std::min(text.size(), pos + e.byte); ++i)
            if (text[i] == '\n') ++line;
        throw ParseError("report parse error near line " + std::to_string(line) + ": " +
                         e.what());
    }

    try {
        if (j.at("format").get<std::string>() != "vascnet-report")
            throw ParseError("report parse error: not a vascnet-report document");
        const int version = j.at("version").get<int>();
        if (version > kReportVersion)
            throw ParseError("report parse error: file has version " + std::to_string(version) +
                             " but this tool reads up to version " +
                             std::to_string(kReportVersion));
        StabilityReport rep;
        j.at("initial_gap").get_to(rep.initial_gap);
        j.at("final_gap").get_to(rep.final_gap);
        j.at("t").get_to(rep.t);
        j.at("gap_series").get_to(rep.gap_series);
        if (!j.at("fitted_decay_rate").is_null())
            rep.fitted_decay_rate = j.at("fitted_decay_rate").get<double>();
        j.at("mass_drift").get_to(rep.mass_drift);
        j.at("initial_energy_gap").get_to(rep.initial_energy_gap);
        j.at("metadata").get_to(rep.metadata);
        rep.run = detail::run_from_json(j.at("run"));
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report parse error: ") + e.what());
    }
}

inline void save_report(const StabilityReport& rep, const std::string& path,
                        const std::string& config_hash = "") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("save_report: cannot open " + path);
    out << report_to_string(rep, config_hash);
}

inline StabilityReport load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("load_report: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_string(buf.str());
}

} // namespace vascnet
