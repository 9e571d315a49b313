#pragma once

// JSON run configuration. Every numeric default lives in the structs it configures;
// default_config_json() serializes them, so the schema and its defaults cannot drift.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emt/ahp.hpp"
#include "emt/baseline.hpp"
#include "emt/emt_problem.hpp"
#include "emt/errors.hpp"
#include "emt/io.hpp"
#include "emt/objectives.hpp"
#include "emt/powertrain.hpp"
#include "emt/synthetic_maps.hpp"

namespace emt {

struct CycleOptions {
    bool dt_tolerant = false;
    std::size_t min_segment_length = 1;  // classify: merge shorter segments into a neighbour
    std::uint64_t seed = kDefaultCycleSeed;
};

/// Optional component-map files; empty paths select the bundled synthetic maps.
struct MapPaths {
    std::string engine_fuel;
    std::string engine_max_torque;
    std::string machine_a_efficiency;
    std::string machine_a_max_power;
    std::string machine_b_efficiency;
    std::string machine_b_max_power;
};

struct RunConfig {
    BatteryPack battery;
    VehicleParams vehicle;
    ObjectiveParams objectives;
    ahp::WeightMode weight_mode = ahp::WeightMode::Constants;
    DpConfig dp;
    RuleConfig rule;
    CycleOptions cycle;
    MapPaths maps;
};

using nlohmann::json;

inline json to_json(const RunConfig& c) {
    json j;
    const auto& b = c.battery;
    j["battery"] = {{"voc", b.voc},
                    {"rb", b.rb},
                    {"cb", b.cb},
                    {"soc_min", b.soc_min},
                    {"soc_max", b.soc_max},
                    {"soc_init", b.soc_init},
                    {"p_abs_max", b.p_abs_max},
                    {"p_lim_soc", b.p_lim_curve.xs},
                    {"p_lim_kw", b.p_lim_curve.ys}};
    const auto& v = c.vehicle;
    j["vehicle"] = {{"mass", v.mass},
                    {"gravity", v.gravity},
                    {"final_drive_ratio", v.final_drive_ratio},
                    {"sprocket_radius", v.sprocket_radius},
                    {"coupling_coeffs", v.coupling_coeffs},
                    {"mech_path_eff", v.mech_path_eff},
                    {"elec_loss_frac", v.elec_loss_frac},
                    {"proc_loss_frac", v.proc_loss_frac},
                    {"fuel_density", v.fuel_density}};
    const auto& o = c.objectives;
    j["objectives"] = {{"gamma1", o.gamma1},     {"gamma2", o.gamma2},     {"soc0", o.soc0},
                       {"fuel_max", o.fuel_max}, {"dsoc_max", o.dsoc_max}, {"soc_dev_max", o.soc_dev_max}};
    j["weights"] = {{"mode", std::string(ahp::to_string(c.weight_mode))}};
    const auto& d = c.dp;
    j["dp"] = {{"soc_nodes", d.soc_nodes},
               {"ne_count", d.ne_count},
               {"ta_count", d.ta_count},
               {"tb_count", d.tb_count},
               {"ne_min", d.ne_min},
               {"ne_max", d.ne_max},
               {"ta_max", d.ta_max},
               {"tb_max", d.tb_max},
               {"balance_tol", d.balance_tol},
               {"infeasible_penalty", d.infeasible_penalty},
               {"terminal_soc_penalty", d.terminal_soc_penalty},
               {"interpolation", d.interpolation},
               {"threads", d.threads}};
    const auto& r = c.rule;
    j["rule"] = {{"soc_low", r.soc_low},
                 {"soc_high", r.soc_high},
                 {"charge_power", r.charge_power},
                 {"assist_power", r.assist_power}};
    j["cycle"] = {{"dt_tolerant", c.cycle.dt_tolerant},
                  {"min_segment_length", c.cycle.min_segment_length},
                  {"seed", c.cycle.seed}};
    const auto& m = c.maps;
    j["maps"] = {{"engine_fuel", m.engine_fuel},
                 {"engine_max_torque", m.engine_max_torque},
                 {"machine_a_efficiency", m.machine_a_efficiency},
                 {"machine_a_max_power", m.machine_a_max_power},
                 {"machine_b_efficiency", m.machine_b_efficiency},
                 {"machine_b_max_power", m.machine_b_max_power}};
    return j;
}

inline json default_config_json() { return to_json(RunConfig{}); }

namespace detail {

/// Rejects keys absent from the schema and type changes between object and scalar.
inline void check_keys(const json& user, const json& schema, const std::string& prefix) {
    if (!user.is_object()) throw ConfigError("config: '" + (prefix.empty() ? "<root>" : prefix) + "' must be an object");
    for (const auto& [key, value] : user.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (!schema.contains(key)) throw ConfigError("config: unknown key '" + path + "'");
        if (schema[key].is_object()) check_keys(value, schema[key], path);
    }
}

template <class T>
T get(const json& j, std::string_view section, std::string_view key) {
    try {
        return j.at(std::string(section)).at(std::string(key)).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: '" + std::string(section) + "." + std::string(key) + "' has the wrong type");
    }
}

}  // namespace detail

/// Reads a complete configuration (defaults already merged) and validates it.
inline RunConfig from_json(const json& j) {
    using detail::get;
    RunConfig c;
    auto& b = c.battery;
    b.voc = get<double>(j, "battery", "voc");
    b.rb = get<double>(j, "battery", "rb");
    b.cb = get<double>(j, "battery", "cb");
    b.soc_min = get<double>(j, "battery", "soc_min");
    b.soc_max = get<double>(j, "battery", "soc_max");
    b.soc_init = get<double>(j, "battery", "soc_init");
    b.p_abs_max = get<double>(j, "battery", "p_abs_max");
    b.p_lim_curve.xs = get<std::vector<double>>(j, "battery", "p_lim_soc");
    b.p_lim_curve.ys = get<std::vector<double>>(j, "battery", "p_lim_kw");
    auto& v = c.vehicle;
    v.mass = get<double>(j, "vehicle", "mass");
    v.gravity = get<double>(j, "vehicle", "gravity");
    v.final_drive_ratio = get<double>(j, "vehicle", "final_drive_ratio");
    v.sprocket_radius = get<double>(j, "vehicle", "sprocket_radius");
    const auto cc = get<std::vector<double>>(j, "vehicle", "coupling_coeffs");
    if (cc.size() != 4) throw ConfigError("config: 'vehicle.coupling_coeffs' needs exactly 4 numbers");
    std::copy(cc.begin(), cc.end(), v.coupling_coeffs.begin());
    v.mech_path_eff = get<double>(j, "vehicle", "mech_path_eff");
    v.elec_loss_frac = get<double>(j, "vehicle", "elec_loss_frac");
    v.proc_loss_frac = get<double>(j, "vehicle", "proc_loss_frac");
    v.fuel_density = get<double>(j, "vehicle", "fuel_density");
    auto& o = c.objectives;
    o.gamma1 = get<double>(j, "objectives", "gamma1");
    o.gamma2 = get<double>(j, "objectives", "gamma2");
    o.soc0 = get<double>(j, "objectives", "soc0");
    o.fuel_max = get<double>(j, "objectives", "fuel_max");
    o.dsoc_max = get<double>(j, "objectives", "dsoc_max");
    o.soc_dev_max = get<double>(j, "objectives", "soc_dev_max");
    c.weight_mode = ahp::parse_weight_mode(get<std::string>(j, "weights", "mode"));
    auto& d = c.dp;
    d.soc_nodes = get<std::size_t>(j, "dp", "soc_nodes");
    d.ne_count = get<std::size_t>(j, "dp", "ne_count");
    d.ta_count = get<std::size_t>(j, "dp", "ta_count");
    d.tb_count = get<std::size_t>(j, "dp", "tb_count");
    d.ne_min = get<double>(j, "dp", "ne_min");
    d.ne_max = get<double>(j, "dp", "ne_max");
    d.ta_max = get<double>(j, "dp", "ta_max");
    d.tb_max = get<double>(j, "dp", "tb_max");
    d.balance_tol = get<double>(j, "dp", "balance_tol");
    d.infeasible_penalty = get<double>(j, "dp", "infeasible_penalty");
    d.terminal_soc_penalty = get<double>(j, "dp", "terminal_soc_penalty");
    d.interpolation = get<std::string>(j, "dp", "interpolation");
    d.threads = get<unsigned>(j, "dp", "threads");
    auto& r = c.rule;
    r.soc_low = get<double>(j, "rule", "soc_low");
    r.soc_high = get<double>(j, "rule", "soc_high");
    r.charge_power = get<double>(j, "rule", "charge_power");
    r.assist_power = get<double>(j, "rule", "assist_power");
    c.cycle.dt_tolerant = get<bool>(j, "cycle", "dt_tolerant");
    c.cycle.min_segment_length = get<std::size_t>(j, "cycle", "min_segment_length");
    c.cycle.seed = get<std::uint64_t>(j, "cycle", "seed");
    auto& m = c.maps;
    m.engine_fuel = get<std::string>(j, "maps", "engine_fuel");
    m.engine_max_torque = get<std::string>(j, "maps", "engine_max_torque");
    m.machine_a_efficiency = get<std::string>(j, "maps", "machine_a_efficiency");
    m.machine_a_max_power = get<std::string>(j, "maps", "machine_a_max_power");
    m.machine_b_efficiency = get<std::string>(j, "maps", "machine_b_efficiency");
    m.machine_b_max_power = get<std::string>(j, "maps", "machine_b_max_power");

    b.validate();
    v.validate();
    o.validate();
    d.validate();
    r.validate(b);
    if (c.cycle.min_segment_length == 0) throw ConfigError("config: 'cycle.min_segment_length' must be at least 1");
    return c;
}

/// Defaults, then the user's file (may be partial), then each override in order.
class ConfigBuilder {
public:
    ConfigBuilder() : doc_(default_config_json()) {}

    ConfigBuilder& merge(const json& user) {
        detail::check_keys(user, doc_, "");
        doc_.merge_patch(user);
        return *this;
    }

    ConfigBuilder& merge_text(std::string_view text) {
        json user;
        try {
            user = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        return merge(user);
    }

    /// "section.key=value"; value is read as JSON, falling back to a bare string.
    ConfigBuilder& set(std::string_view assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos) throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
        const std::string key(io::trim(assignment.substr(0, eq)));
        const std::string raw(io::trim(assignment.substr(eq + 1)));
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;

        json patch = value;
        std::string_view rest = key;
        std::vector<std::string> parts;
        while (true) {
            const auto dot = rest.find('.');
            parts.emplace_back(rest.substr(0, dot));
            if (dot == std::string_view::npos) break;
            rest.remove_prefix(dot + 1);
        }
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
            if (it->empty()) throw ConfigError("--set key '" + key + "' has an empty component");
            patch = json{{*it, patch}};
        }
        const json* node = &doc_;
        for (const auto& p : parts) {
            if (!node->is_object() || !node->contains(p)) throw ConfigError("config: unknown key '" + key + "'");
            node = &(*node)[p];
        }
        if (node->is_object()) throw ConfigError("--set '" + key + "' names a section, not a value");
        doc_.merge_patch(patch);
        return *this;
    }

    const json& effective() const { return doc_; }
    RunConfig build() const { return from_json(doc_); }

private:
    json doc_;
};

/// Model from the configuration: synthetic maps unless map files are given.
inline PowertrainModel load_powertrain(const RunConfig& cfg) {
    PowertrainModel model = default_powertrain();
    const auto& m = cfg.maps;
    const auto pair_given = [](const std::string& a, const std::string& b, const char* what) {
        if (a.empty() != b.empty()) throw ConfigError(std::string("config: maps.") + what + " needs both files");
        return !a.empty();
    };
    if (pair_given(m.engine_fuel, m.engine_max_torque, "engine_*")) {
        model.engine = io::parse_engine_map(io::read_file(m.engine_fuel), io::read_file(m.engine_max_torque));
    }
    if (pair_given(m.machine_a_efficiency, m.machine_a_max_power, "machine_a_*")) {
        model.machine_a = io::parse_machine_map(io::read_file(m.machine_a_efficiency), io::read_file(m.machine_a_max_power));
    }
    if (pair_given(m.machine_b_efficiency, m.machine_b_max_power, "machine_b_*")) {
        model.machine_b = io::parse_machine_map(io::read_file(m.machine_b_efficiency), io::read_file(m.machine_b_max_power));
    }
    model.battery = cfg.battery;
    model.vehicle = cfg.vehicle;
    model.validate();
    return model;
}

}  // namespace emt
