#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "emt/errors.hpp"
#include "emt/interp.hpp"

namespace emt {

inline constexpr double kRpmToRadPerSec = 2.0 * std::numbers::pi / 60.0;

/// Shaft power in kW from speed (rpm) and torque (N·m).
inline double shaft_power_kw(double n_rpm, double t_nm) { return t_nm * n_rpm * kRpmToRadPerSec / 1000.0; }

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

/// Fuel-rate map over (speed rpm, torque N·m) plus the external characteristic curve.
struct EngineMap {
    Table2D fuel;            // x = speed grid, y = torque grid, g/s
    Curve1D max_torque;      // speed rpm -> N·m

    const std::vector<double>& speed_grid() const { return fuel.xs; }
    const std::vector<double>& torque_grid() const { return fuel.ys; }

    void validate() const {
        fuel.validate("engine fuel map");
        max_torque.validate("engine max-torque curve");
        for (double v : fuel.values) {
            if (v < 0.0) throw ConfigError("engine fuel map has a negative fuel rate");
        }
        for (double t : max_torque.ys) {
            if (t < torque_grid().front() || t > torque_grid().back()) {
                throw ConfigError("engine max-torque curve leaves the torque grid");
            }
        }
    }
};

inline double engine_max_torque(const EngineMap& map, double ne) {
    if (!within(map.speed_grid(), ne)) {
        throw EnvelopeError("engine speed " + std::to_string(ne) + " rpm outside speed grid");
    }
    return map.max_torque.at(ne, "engine max-torque curve");
}

inline double engine_max_power(const EngineMap& map, double ne) {
    return shaft_power_kw(ne, engine_max_torque(map, ne));
}

inline double lookup_fuel_rate(const EngineMap& map, double ne, double te) {
    const auto& ns = map.speed_grid();
    const auto& ts = map.torque_grid();
    if (ne < ns.front()) throw EnvelopeError("engine speed below speed grid minimum");
    if (ne > ns.back()) throw EnvelopeError("engine speed above speed grid maximum");
    if (te < ts.front()) throw EnvelopeError("engine torque below torque grid minimum");
    if (te > ts.back()) throw EnvelopeError("engine torque above torque grid maximum");
    const double limit = map.max_torque.at(ne, "engine max-torque curve");
    if (te > limit + 1e-9 * (1.0 + std::abs(limit))) {
        throw EnvelopeError("engine torque " + std::to_string(te) + " exceeds max-torque curve " +
                            std::to_string(limit) + " at " + std::to_string(ne) + " rpm");
    }
    return map.fuel.bilinear(ne, te);
}

/// Largest interpolated fuel rate over the feasible envelope, found by walking the
/// max-torque curve densely and checking every feasible grid node.
inline double max_feasible_fuel(const EngineMap& map, std::size_t samples_per_cell = 64) {
    double best = 0.0;
    const auto& ns = map.speed_grid();
    for (std::size_t ix = 0; ix < ns.size(); ++ix) {
        const double limit = map.max_torque.at_clamped(ns[ix]);
        for (std::size_t iy = 0; iy < map.torque_grid().size(); ++iy) {
            if (map.torque_grid()[iy] <= limit) best = std::max(best, map.fuel.node(ix, iy));
        }
    }
    for (std::size_t ix = 0; ix + 1 < ns.size(); ++ix) {
        for (std::size_t s = 0; s <= samples_per_cell; ++s) {
            const double n = ns[ix] + (ns[ix + 1] - ns[ix]) * static_cast<double>(s) / samples_per_cell;
            const double t = map.max_torque.at_clamped(n);
            best = std::max(best, map.fuel.bilinear(n, t));
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Electric machines
// ---------------------------------------------------------------------------

/// Efficiency map over (|speed| rpm, |torque| N·m) and the torque -> max power curve.
/// Lookups use magnitudes: efficiency is taken as symmetric across the four quadrants.
struct MachineMap {
    Table2D efficiency;      // x = speed grid, y = torque grid
    Curve1D max_power;       // |torque| N·m -> kW

    const std::vector<double>& speed_grid() const { return efficiency.xs; }
    const std::vector<double>& torque_grid() const { return efficiency.ys; }

    void validate(std::string_view name = "machine") const {
        efficiency.validate(std::string(name) + " efficiency map");
        max_power.validate(std::string(name) + " max-power curve");
        for (double e : efficiency.values) {
            if (!(e > 0.0 && e <= 1.0)) throw ConfigError(std::string(name) + " efficiency outside (0, 1]");
        }
        for (double p : max_power.ys) {
            if (p < 0.0) throw ConfigError(std::string(name) + " max power is negative");
        }
    }
};

inline double machine_efficiency(const MachineMap& map, double n, double t) {
    const double an = std::abs(n);
    const double at = std::abs(t);
    if (!within(map.speed_grid(), an)) {
        throw EnvelopeError("machine speed " + std::to_string(n) + " rpm outside efficiency map");
    }
    if (!within(map.torque_grid(), at)) {
        throw EnvelopeError("machine torque " + std::to_string(t) + " N·m outside efficiency map");
    }
    return map.efficiency.bilinear(an, at);
}

inline double machine_max_power(const MachineMap& map, double t) {
    return map.max_power.at(std::abs(t), "machine max-power curve");
}

/// Electrical power drawn from the bus by a machine with shaft power p (motoring positive).
/// Equals p·η^(-sgn p): motoring draws more than it delivers, generating returns less.
inline double bus_power(double p, double eta) {
    if (p > 0.0) return p / eta;
    if (p < 0.0) return p * eta;
    return 0.0;
}

// ---------------------------------------------------------------------------
// Battery
// ---------------------------------------------------------------------------

struct BatteryPack {
    double voc = 600.0;       // V
    double rb = 0.05;         // Ω
    double cb = 99.0;         // Ah
    double soc_min = 0.3;
    double soc_max = 0.8;
    double soc_init = 0.5;
    double p_abs_max = 220.0;  // kW
    Curve1D p_lim_curve{{0.0, 0.3, 0.4, 1.0}, {0.0, 0.0, 220.0, 220.0}};  // soc -> max discharge kW

    void validate() const {
        if (!(voc > 0.0)) throw ConfigError("battery.voc must be positive");
        if (!(rb > 0.0)) throw ConfigError("battery.rb must be positive");
        if (!(cb > 0.0)) throw ConfigError("battery.cb must be positive");
        if (!(0.0 <= soc_min && soc_min < soc_init && soc_init < soc_max && soc_max <= 1.0)) {
            throw ConfigError("battery SOC bounds must satisfy 0 <= soc_min < soc_init < soc_max <= 1");
        }
        if (!(p_abs_max >= 0.0)) throw ConfigError("battery.p_abs_max must be non-negative");
        p_lim_curve.validate("battery p_lim_curve");
        for (double p : p_lim_curve.ys) {
            if (p < 0.0 || p > p_abs_max) throw ConfigError("battery p_lim_curve must lie within [0, p_abs_max]");
        }
    }
};

/// SOC change over dt seconds for battery power ps (kW, charging positive).
/// Written as 4·P·Rb / (sqrt(Voc² + 4·P·Rb) + Voc) / (7200·Cb·Rb), the cancellation-free
/// form of (sqrt(Voc² + 4·P·Rb) - Voc) / (7200·Cb·Rb).
inline double battery_soc_step(const BatteryPack& batt, double ps_kw, double dt) {
    const double p_w = ps_kw * 1000.0;
    const double disc = batt.voc * batt.voc + 4.0 * p_w * batt.rb;
    if (disc < 0.0) {
        throw InfeasiblePowerError("battery cannot deliver " + std::to_string(-ps_kw) + " kW");
    }
    const double per_second = (4.0 * p_w * batt.rb) / (std::sqrt(disc) + batt.voc) / (7200.0 * batt.cb * batt.rb);
    return per_second * dt;
}

/// Largest discharge power available at soc, in kW (non-negative).
inline double battery_max_discharge(const BatteryPack& batt, double soc) {
    if (soc <= batt.soc_min) return 0.0;
    return std::clamp(batt.p_lim_curve.at_clamped(soc), 0.0, batt.p_abs_max);
}

// ---------------------------------------------------------------------------
// Vehicle and power balance
// ---------------------------------------------------------------------------

struct VehicleParams {
    double mass = 45000.0;            // kg
    double gravity = 9.81;            // m/s²
    double final_drive_ratio = 5.0;
    double sprocket_radius = 0.32;    // m
    std::array<double, 4> coupling_coeffs{1.2, -0.8, 0.3, 1.0};
    double mech_path_eff = 0.95;
    double elec_loss_frac = 0.02;
    double proc_loss_frac = 0.03;
    double fuel_density = 835.0;      // g/L

    void validate() const {
        if (!(mass > 0.0)) throw ConfigError("vehicle.mass must be positive");
        if (!(gravity > 0.0)) throw ConfigError("vehicle.gravity must be positive");
        if (!(final_drive_ratio > 0.0)) throw ConfigError("vehicle.final_drive_ratio must be positive");
        if (!(sprocket_radius > 0.0)) throw ConfigError("vehicle.sprocket_radius must be positive");
        if (!(mech_path_eff > 0.0 && mech_path_eff <= 1.0)) {
            throw ConfigError("vehicle.mech_path_eff must be in (0, 1]");
        }
        if (!(elec_loss_frac >= 0.0 && elec_loss_frac <= 0.2)) {
            throw ConfigError("vehicle.elec_loss_frac must be in [0, 0.2]");
        }
        if (!(proc_loss_frac >= 0.0 && proc_loss_frac <= 0.2)) {
            throw ConfigError("vehicle.proc_loss_frac must be in [0, 0.2]");
        }
        if (!(fuel_density > 0.0)) throw ConfigError("vehicle.fuel_density must be positive");
    }

    /// Output shaft speed in rpm for a vehicle speed in km/h.
    double output_speed_rpm(double v_kmh) const {
        const double v = v_kmh / 3.6;
        return v / sprocket_radius * final_drive_ratio / kRpmToRadPerSec;
    }

    double machine_a_speed(double ne, double n_out) const {
        return coupling_coeffs[0] * ne + coupling_coeffs[1] * n_out;
    }
    double machine_b_speed(double ne, double n_out) const {
        return coupling_coeffs[2] * ne + coupling_coeffs[3] * n_out;
    }
};

/// Demanded driving power in kW: rolling resistance plus acceleration, v in m/s.
inline double demanded_drive_power(const VehicleParams& params, double v_mps, double f, double accel) {
    return (params.mass * params.gravity * f * v_mps + params.mass * accel * v_mps) / 1000.0;
}

/// All powers in kW. ps charging positive; pa/pb are machine shaft powers, motoring positive.
struct PowerFlow {
    double ps = 0.0;
    double pc = 0.0;
    double pl = 0.0;
    double pa = 0.0;
    double pb = 0.0;
    double pe = 0.0;
    double pd = 0.0;
    double ploss = 0.0;
};

struct BalanceResiduals {
    double elec = 0.0;
    double drive = 0.0;
};

/// Left-minus-right of the electric bus balance and the driving power balance.
inline BalanceResiduals power_balance_residuals(const PowerFlow& flow, double eta_a, double eta_b,
                                                double mech_path_eff) {
    const auto term = [](double p, double eta) { return p * std::pow(eta, -static_cast<double>((p > 0) - (p < 0))); };
    BalanceResiduals r;
    r.elec = flow.ps + flow.pc + flow.pl + term(flow.pa, eta_a) + term(flow.pb, eta_b);
    r.drive = flow.pe * mech_path_eff - (flow.pd + flow.pc + flow.ploss + flow.ps);
    return r;
}

struct PowertrainModel {
    EngineMap engine;
    MachineMap machine_a;
    MachineMap machine_b;
    BatteryPack battery;
    VehicleParams vehicle;

    void validate() const {
        engine.validate();
        machine_a.validate("machine A");
        machine_b.validate("machine B");
        battery.validate();
        vehicle.validate();
    }
};

}  // namespace emt
