#pragma once

#include <cmath>

#include "emt/errors.hpp"

namespace emt {

struct ObjectiveParams {
    double gamma1 = -12500.0;   // grams-equivalent per unit SOC change
    double gamma2 = 2000.0;     // SOC-deviation scale
    double soc0 = 0.5;
    double fuel_max = 72.0;     // g/s
    double dsoc_max = 0.001;    // per-step SOC change at full battery power
    double soc_dev_max = 0.3;

    /// Normalizer of the economy objective: its value with every term at its maximum.
    double j1_max() const { return fuel_max + gamma1 * dsoc_max + gamma2 * soc_dev_max * soc_dev_max; }

    void validate() const {
        if (!(fuel_max > 0.0)) throw ConfigError("objectives.fuel_max must be positive");
        if (!(dsoc_max > 0.0)) throw ConfigError("objectives.dsoc_max must be positive");
        if (!(soc_dev_max > 0.0)) throw ConfigError("objectives.soc_dev_max must be positive");
        if (!(j1_max() > 0.0)) throw ConfigError("objectives: economy normalizer must be positive");
    }
};

struct ObjectiveValues {
    double j1_raw = 0.0;   // g/s equivalent
    double j2_raw = 0.0;   // kW
    double j3_raw = 0.0;   // kW
    double j1_bar = 0.0;
    double j2_bar = 0.0;
    double j3_bar = 0.0;
};

/// Weights of (economy, driving reserve, generating reserve) for one driving pattern.
struct PatternWeights {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;

    double sum() const { return alpha1 + alpha2 + alpha3; }

    void validate() const {
        if (alpha1 < 0.0 || alpha2 < 0.0 || alpha3 < 0.0) throw ConfigError("pattern weights must be non-negative");
        if (std::abs(sum() - 1.0) > 1e-9) throw ConfigError("pattern weights must sum to 1");
    }

    bool operator==(const PatternWeights&) const = default;
};

/// Economy objective: fuel rate plus battery-equivalent fuel plus SOC-deviation wear.
inline double j1_raw(double fuel, double dsoc, double soc, const ObjectiveParams& p) {
    const double dev = soc - p.soc0;
    return fuel + p.gamma1 * dsoc + p.gamma2 * dev * dev;
}

/// Driving power reserve.
inline double j2_raw(double pe_max, double ps_max, double pd) { return pe_max + ps_max - pd; }

/// Generating power reserve.
inline double j3_raw(double pa_max, double pb_max, double ps_max, double pc) { return pa_max + pb_max + ps_max - pc; }

inline double j1_norm(double j1, const ObjectiveParams& p) {
    const double denom = p.j1_max();
    if (!(denom > 0.0)) throw ConfigError("objectives: economy normalizer must be positive");
    return j1 / denom;
}

inline double j2_norm(double pe_max, double ps_max, double pd) {
    const double capacity = pe_max + ps_max;
    if (!(capacity > 0.0)) throw ConfigError("driving capacity must be positive");
    return -(capacity - pd) / capacity;
}

inline double j3_norm(double pa_max, double pb_max, double ps_max, double pc) {
    const double capacity = pa_max + pb_max + ps_max;
    if (!(capacity > 0.0)) throw ConfigError("generating capacity must be positive");
    return -(capacity - pc) / capacity;
}

inline double composite(const PatternWeights& w, const ObjectiveValues& v) {
    return w.alpha1 * v.j1_bar + w.alpha2 * v.j2_bar + w.alpha3 * v.j3_bar;
}

}  // namespace emt
