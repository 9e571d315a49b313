#pragma once

// Rule-based comparison strategy: a power follower with an SOC band.
//
//   soc below soc_low            -> charge at charge_power
//   soc above soc_high           -> discharge up to assist_power
//   inside the band              -> battery idle
//   demand beyond engine limit   -> battery covers the excess (any SOC)
//   braking                      -> recover up to the battery power limit
//
// The engine speed follows the minimum-fuel operating line for the commanded engine power.
// The commanded decision is then snapped to the solver's action grid so both strategies
// choose from the same discrete set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "emt/emt_problem.hpp"
#include "emt/powertrain.hpp"
#include "emt/trajectory.hpp"

namespace emt {

struct RuleConfig {
    double soc_low = 0.45;
    double soc_high = 0.55;
    double charge_power = 50.0;   // kW
    double assist_power = 50.0;   // kW

    void validate(const BatteryPack& batt) const {
        if (!(batt.soc_min < soc_low && soc_low < soc_high && soc_high < batt.soc_max)) {
            throw ConfigError("rule band must satisfy soc_min < soc_low < soc_high < soc_max");
        }
        if (!(charge_power >= 0.0 && charge_power <= batt.p_abs_max)) {
            throw ConfigError("rule.charge_power must lie within [0, battery.p_abs_max]");
        }
        if (!(assist_power >= 0.0 && assist_power <= batt.p_abs_max)) {
            throw ConfigError("rule.assist_power must lie within [0, battery.p_abs_max]");
        }
    }
};

/// Minimum-fuel engine speed per engine power level, derived from the fuel map.
class OperatingLine {
public:
    static OperatingLine from_engine(const EngineMap& map, double power_step = 5.0, double speed_step = 25.0) {
        OperatingLine line;
        const double n_lo = map.speed_grid().front();
        const double n_hi = map.speed_grid().back();
        double p_top = 0.0;
        for (double n = n_lo; n <= n_hi + 1e-9; n += speed_step) p_top = std::max(p_top, engine_max_power(map, n));
        line.max_power_ = p_top;
        for (double p = 0.0; p <= p_top + 1e-9; p += power_step) {
            double best_fuel = std::numeric_limits<double>::infinity();
            double best_n = n_hi;
            for (double n = n_lo; n <= n_hi + 1e-9; n += speed_step) {
                const double te = p * 1000.0 / (n * kRpmToRadPerSec);
                if (te > engine_max_torque(map, n)) continue;
                const double fuel = lookup_fuel_rate(map, n, te);
                if (fuel < best_fuel) {
                    best_fuel = fuel;
                    best_n = n;
                }
            }
            line.power_.push_back(p);
            line.speed_.push_back(best_n);
        }
        return line;
    }

    double max_power() const { return max_power_; }

    /// Speed at the nearest tabulated power level at or above pe.
    double speed_for(double pe) const {
        const auto it = std::lower_bound(power_.begin(), power_.end(), pe);
        if (it == power_.end()) return speed_.back();
        return speed_[static_cast<std::size_t>(it - power_.begin())];
    }

    const std::vector<double>& powers() const { return power_; }
    const std::vector<double>& speeds() const { return speed_; }

private:
    std::vector<double> power_;
    std::vector<double> speed_;
    double max_power_ = 0.0;
};

struct RuleDecision {
    double demand = 0.0;          // pd + pc + process loss, kW
    double commanded_ps = 0.0;    // kW, charging positive
    double commanded_pe = 0.0;    // kW
    double commanded_ne = 0.0;    // rpm
    std::string branch;
    bool saturated = false;       // demand beyond engine plus battery capability
    bool fallback = false;        // no grid action feasible at this SOC
    std::optional<ActionCandidate> action;  // snapped decision, state applied
    double snap_dps = 0.0;        // |ps(snapped) - commanded_ps|
    double snap_dne = 0.0;
};

/// Highest engine power reachable on the solver's speed grid.
inline double engine_capability(const EmtProblem& problem) {
    double cap = 0.0;
    for (double ne : problem.action_grid().ne) cap = std::max(cap, engine_max_power(problem.model().engine, ne));
    return cap;
}

inline RuleDecision rule_step(const EmtProblem& problem, std::size_t k, double soc, const RuleConfig& cfg,
                              const OperatingLine& line) {
    const auto& model = problem.model();
    const auto& batt = model.battery;
    const auto& st = problem.stage(k);
    const double eta = model.vehicle.mech_path_eff;
    const double engine_cap = engine_capability(problem) * eta;
    const double discharge_cap = battery_max_discharge(batt, soc);

    RuleDecision d;
    d.demand = st.pd + st.pc + model.vehicle.proc_loss_frac * std::abs(st.pd);
    if (d.demand < 0.0) {
        d.branch = "regen";
        d.commanded_ps = std::min(-d.demand, batt.p_abs_max);
    } else if (d.demand > engine_cap) {
        d.branch = "assist-limit";
        const double excess = d.demand - engine_cap;
        d.commanded_ps = -std::min(excess, discharge_cap);
        d.saturated = excess > discharge_cap;
    } else if (soc < cfg.soc_low) {
        d.branch = "charge";
        d.commanded_ps = std::min(cfg.charge_power, engine_cap - d.demand);
    } else if (soc > cfg.soc_high) {
        d.branch = "assist";
        d.commanded_ps = -std::min({cfg.assist_power, d.demand, discharge_cap});
    } else {
        d.branch = "hold";
        d.commanded_ps = 0.0;
    }
    d.commanded_pe = std::max(0.0, (d.demand + d.commanded_ps) / eta);
    d.commanded_ne = line.speed_for(d.commanded_pe);

    // Snap: grid speeds in order of distance from the commanded speed; at the first speed
    // with any feasible action, take the one whose battery power is closest to the command.
    const auto& grid = problem.action_grid();
    std::vector<std::size_t> speed_order(grid.ne.size());
    for (std::size_t i = 0; i < speed_order.size(); ++i) speed_order[i] = i;
    std::stable_sort(speed_order.begin(), speed_order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(grid.ne[a] - d.commanded_ne) < std::abs(grid.ne[b] - d.commanded_ne);
    });
    for (std::size_t ine : speed_order) {
        std::optional<ActionCandidate> best;
        for (std::size_t ita = 0; ita < grid.ta.size(); ++ita) {
            for (std::size_t itb = 0; itb < grid.tb.size(); ++itb) {
                auto c = problem.candidate_at(k, soc, grid.index(ine, ita, itb));
                if (!c) continue;
                if (!best || std::abs(c->flow.ps - d.commanded_ps) < std::abs(best->flow.ps - d.commanded_ps)) {
                    best = std::move(c);
                }
            }
        }
        if (best) {
            d.snap_dps = std::abs(best->flow.ps - d.commanded_ps);
            d.snap_dne = std::abs(best->ne - d.commanded_ne);
            d.action = std::move(best);
            return d;
        }
    }

    // Nothing feasible at this SOC: take the closest decision-feasible action and flag it.
    d.fallback = true;
    std::optional<ActionCandidate> best;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        auto c = problem.decision_candidate(k, a);
        if (!c) continue;
        if (!best || std::abs(c->flow.ps - d.commanded_ps) < std::abs(best->flow.ps - d.commanded_ps)) best = std::move(c);
    }
    if (best) {
        best->soc = soc;
        best->ps_max = discharge_cap;
        d.snap_dps = std::abs(best->flow.ps - d.commanded_ps);
        d.snap_dne = std::abs(best->ne - d.commanded_ne);
        d.action = std::move(best);
    }
    return d;
}

struct RuleRun {
    Trajectory trajectory;
    std::size_t saturated_stages = 0;
    std::size_t fallback_stages = 0;
    double max_snap_dps = 0.0;
    double max_snap_dne = 0.0;
    double mean_snap_dps = 0.0;
};

/// Forward simulation of the rule over the whole cycle. Always completes; stages where the
/// rule cannot be honoured are counted as saturated or fallback.
inline RuleRun simulate_rule(const EmtProblem& problem, const RuleConfig& cfg, double x0) {
    const auto& batt = problem.model().battery;
    cfg.validate(batt);
    const OperatingLine line = OperatingLine::from_engine(problem.model().engine);
    RuleRun run;
    double soc = x0;
    for (std::size_t k = 0; k < problem.stage_count(); ++k) {
        RuleDecision d = rule_step(problem, k, soc, cfg, line);
        if (d.saturated) ++run.saturated_stages;
        if (d.fallback) ++run.fallback_stages;
        if (!d.action) throw RolloutError(k, soc);
        run.max_snap_dps = std::max(run.max_snap_dps, d.snap_dps);
        run.max_snap_dne = std::max(run.max_snap_dne, d.snap_dne);
        run.mean_snap_dps += d.snap_dps;
        auto rec = make_record(problem.stage(k), *d.action, problem.evaluate_candidate(k, *d.action));
        rec.soc_next = std::clamp(rec.soc_next, batt.soc_min, batt.soc_max);
        run.trajectory.records.push_back(rec);
        soc = rec.soc_next;
    }
    if (problem.stage_count() > 0) run.mean_snap_dps /= static_cast<double>(problem.stage_count());
    run.trajectory.terminal_cost = problem.terminal_cost(soc);
    return run;
}

}  // namespace emt
