#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "emt/errors.hpp"

namespace emt {

struct CyclePoint {
    double t = 0.0;    // s
    double v = 0.0;    // km/h
    double f = 0.0;    // road drag coefficient
    double pc = 0.0;   // electric power demand, kW

    bool operator==(const CyclePoint&) const = default;
};

struct DriveCycle {
    std::vector<CyclePoint> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const CyclePoint& operator[](std::size_t i) const { return points[i]; }

    /// Step length after stage k; the last stage reuses the previous spacing (1 s for single-point cycles).
    double dt(std::size_t k) const {
        if (points.size() < 2) return 1.0;
        if (k + 1 < points.size()) return points[k + 1].t - points[k].t;
        return points[k].t - points[k - 1].t;
    }

    /// Acceleration over stage k in m/s², zero on the final stage.
    double accel(std::size_t k) const {
        if (k + 1 >= points.size()) return 0.0;
        return (points[k + 1].v - points[k].v) / 3.6 / dt(k);
    }

    /// Row numbers in errors are 1-based data rows (header excluded).
    void validate(bool dt_tolerant = false) const {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            if (!std::isfinite(p.t) || !std::isfinite(p.v) || !std::isfinite(p.f) || !std::isfinite(p.pc)) {
                throw ParseError("non-finite value", i + 1);
            }
            if (p.v < 0.0) throw ParseError("negative speed", i + 1, 2);
            if (p.f < 0.0) throw ParseError("negative road drag coefficient", i + 1, 3);
            if (p.pc < 0.0) throw ParseError("negative electric demand", i + 1, 4);
            if (i > 0) {
                const double step = p.t - points[i - 1].t;
                if (!(step > 0.0)) throw ParseError("time is not strictly increasing", i + 1, 1);
                if (!dt_tolerant && std::abs(step - 1.0) > 1e-9) {
                    throw ParseError("time step is not 1 s", i + 1, 1);
                }
            }
        }
    }

    bool operator==(const DriveCycle&) const = default;
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

inline double round_to(double x, double quantum) { return std::round(x / quantum) * quantum; }

}  // namespace detail

inline constexpr std::uint64_t kDefaultCycleSeed = 1486;
inline constexpr std::size_t kSyntheticCycleLength = 1486;

/// Deterministic synthetic drive cycle: five episodes (low, medium, high, medium, low)
/// with speed targets redrawn every 25-60 s, bounded acceleration, slowly varying road
/// drag and switched electric loads. The low-speed episodes carry the highest drag and
/// electric demand. Starts and ends at standstill.
inline DriveCycle synth_cycle(std::uint64_t seed = kDefaultCycleSeed) {
    struct Episode {
        std::size_t duration;
        double v_lo, v_hi;
        double f_lo, f_hi;
        double pc_lo, pc_hi;
    };
    static constexpr Episode episodes[] = {
        {300, 12.0, 30.0, 0.06, 0.10, 80.0, 130.0},
        {330, 40.0, 56.0, 0.03, 0.05, 20.0, 40.0},
        {260, 63.0, 74.0, 0.02, 0.03, 15.0, 30.0},
        {250, 38.0, 55.0, 0.035, 0.055, 25.0, 45.0},
        {346, 8.0, 28.0, 0.07, 0.10, 90.0, 140.0},
    };
    constexpr double accel_limit = 0.35 * 3.6;   // km/h per s
    constexpr double decel_limit = 0.8 * 3.6;
    constexpr std::size_t final_stop = 40;       // seconds reserved to brake and stand

    std::mt19937_64 rng(seed);
    DriveCycle cycle;
    cycle.points.reserve(kSyntheticCycleLength);

    double v = 0.0;
    double f = episodes[0].f_lo;
    std::size_t t = 0;
    for (const auto& ep : episodes) {
        double target = detail::uniform(rng, ep.v_lo, ep.v_hi);
        double pc_level = detail::uniform(rng, ep.pc_lo, ep.pc_hi);
        std::size_t next_target = static_cast<std::size_t>(detail::uniform(rng, 25.0, 60.0));
        std::size_t next_load = static_cast<std::size_t>(detail::uniform(rng, 20.0, 50.0));
        f = std::clamp(f, ep.f_lo, ep.f_hi);
        for (std::size_t i = 0; i < ep.duration; ++i, ++t) {
            if (t + final_stop >= kSyntheticCycleLength) {
                target = 0.0;
            } else if (i == next_target) {
                target = detail::uniform(rng, ep.v_lo, ep.v_hi);
                next_target += static_cast<std::size_t>(detail::uniform(rng, 25.0, 60.0));
            }
            if (i == next_load) {
                pc_level = detail::uniform(rng, ep.pc_lo, ep.pc_hi);
                next_load += static_cast<std::size_t>(detail::uniform(rng, 20.0, 50.0));
            }
            f = std::clamp(f + detail::uniform(rng, -0.002, 0.002), ep.f_lo, ep.f_hi);

            CyclePoint p;
            p.t = static_cast<double>(t);
            p.v = detail::round_to(v, 0.01);
            p.f = detail::round_to(f, 0.0001);
            p.pc = detail::round_to(pc_level, 0.1);
            cycle.points.push_back(p);

            // Speed for the next second: close the gap to target, easing in over the last few km/h.
            const double gap = target - v;
            const double step = gap > 0.0 ? std::min(gap * 0.25 + 0.2, accel_limit)
                                          : std::max(gap * 0.25 - 0.2, -decel_limit);
            v = std::abs(gap) < std::abs(step) ? target : v + step;
            v = std::max(v, 0.0);
        }
    }
    cycle.points.back().v = 0.0;
    return cycle;
}

}  // namespace emt
