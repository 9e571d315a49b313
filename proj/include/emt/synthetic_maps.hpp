#pragma once

// Bundled component maps. These are synthetic stand-ins shaped like a large tracked-vehicle
// diesel and two mid-size traction machines; they are not measured data.

#include <algorithm>
#include <cmath>

#include "emt/interp.hpp"
#include "emt/powertrain.hpp"

namespace emt {

namespace detail {

inline double synthetic_engine_fuel(double n, double t) {
    constexpr double lhv = 42.5;  // kJ/g
    const double p = shaft_power_kw(n, t);
    const double friction = 0.3 + 0.3 * (n / 1000.0) * (n / 1000.0);
    const double dn = (n - 2000.0) / 2400.0;
    const double eta = 0.40 - 0.07 * dn * dn;
    return friction + p / (eta * lhv);
}

}  // namespace detail

/// Fuel map scaled so that its maximum over the feasible envelope equals fuel_max.
inline EngineMap synthetic_engine_map(double fuel_max = 72.0) {
    EngineMap map;
    map.fuel.xs = linspace(600.0, 4400.0, 20);
    map.fuel.ys = linspace(0.0, 3000.0, 21);
    map.fuel.values.resize(map.fuel.xs.size() * map.fuel.ys.size());
    for (std::size_t iy = 0; iy < map.fuel.ys.size(); ++iy) {
        for (std::size_t ix = 0; ix < map.fuel.xs.size(); ++ix) {
            map.fuel.node(ix, iy) = detail::synthetic_engine_fuel(map.fuel.xs[ix], map.fuel.ys[iy]);
        }
    }
    map.max_torque.xs = {600, 1000, 1400, 1800, 2200, 2600, 3000, 3400, 3800, 4200, 4400};
    map.max_torque.ys = {1200, 2000, 2600, 2800, 2800, 2700, 2500, 2300, 2100, 1900, 1800};

    const double scale = fuel_max / max_feasible_fuel(map);
    for (double& v : map.fuel.values) v *= scale;
    return map;
}

/// Efficiency peaks at 0.92 mid-map; max power is flat at 250 kW up to 600 N·m and falls beyond.
inline MachineMap synthetic_machine_map() {
    MachineMap map;
    map.efficiency.xs = linspace(0.0, 8000.0, 17);
    map.efficiency.ys = linspace(0.0, 1200.0, 13);
    map.efficiency.values.resize(map.efficiency.xs.size() * map.efficiency.ys.size());
    for (std::size_t iy = 0; iy < map.efficiency.ys.size(); ++iy) {
        for (std::size_t ix = 0; ix < map.efficiency.xs.size(); ++ix) {
            const double dn = (map.efficiency.xs[ix] - 4000.0) / 4000.0;
            const double dt = (map.efficiency.ys[iy] - 600.0) / 600.0;
            map.efficiency.node(ix, iy) = 0.92 - 0.10 * dn * dn - 0.08 * dt * dt;
        }
    }
    map.max_power.xs = {0, 200, 400, 600, 800, 1000, 1200};
    map.max_power.ys = {250, 250, 250, 250, 240, 220, 190};
    return map;
}

inline PowertrainModel default_powertrain() {
    PowertrainModel model;
    model.engine = synthetic_engine_map();
    model.machine_a = synthetic_machine_map();
    model.machine_b = synthetic_machine_map();
    return model;
}

}  // namespace emt
