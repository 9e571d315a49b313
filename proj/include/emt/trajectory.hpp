#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "emt/dp.hpp"
#include "emt/emt_problem.hpp"
#include "emt/interp.hpp"
#include "emt/patterns.hpp"

namespace emt {

struct TrajectoryRecord {
    double t = 0.0;
    double dt = 1.0;
    double v_kmh = 0.0;
    DrivingPattern pattern = DrivingPattern::LowSpeed;
    double soc = 0.0;
    double soc_next = 0.0;
    double ne = 0.0;
    double te = 0.0;
    double ta = 0.0;
    double tb = 0.0;
    double ps = 0.0;
    double pa = 0.0;
    double pb = 0.0;
    double pe = 0.0;
    double pd = 0.0;
    double pc = 0.0;
    double fuel = 0.0;
    double j1_bar = 0.0;
    double j2_bar = 0.0;
    double j3_bar = 0.0;
    double stage_cost = 0.0;

    bool operator==(const TrajectoryRecord&) const = default;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    double terminal_cost = 0.0;

    double fuel_grams() const {
        double g = 0.0;
        for (const auto& r : records) g += r.fuel * r.dt;
        return g;
    }
    double fuel_liters(double density) const { return fuel_grams() / density; }

    double composite_cost() const {
        double c = 0.0;
        for (const auto& r : records) c += r.stage_cost;
        return c + terminal_cost;
    }

    double final_soc() const { return records.empty() ? 0.0 : records.back().soc_next; }
};

inline TrajectoryRecord make_record(const StageDemand& st, const ActionCandidate& c, const StageEvaluation& e) {
    TrajectoryRecord r;
    r.t = st.t;
    r.dt = st.dt;
    r.v_kmh = st.v_kmh;
    r.pattern = st.pattern;
    r.soc = c.soc;
    r.soc_next = c.soc + c.dsoc;
    r.ne = c.ne;
    r.te = c.te;
    r.ta = c.ta;
    r.tb = c.tb;
    r.ps = c.flow.ps;
    r.pa = c.flow.pa;
    r.pb = c.flow.pb;
    r.pe = c.flow.pe;
    r.pd = c.flow.pd;
    r.pc = c.flow.pc;
    r.fuel = c.fuel;
    r.j1_bar = e.objectives.j1_bar;
    r.j2_bar = e.objectives.j2_bar;
    r.j3_bar = e.objectives.j3_bar;
    r.stage_cost = e.cost;
    return r;
}

/// Expands a solver path into per-stage records with full power flows.
inline Trajectory build_trajectory(const EmtProblem& problem, const dp::RolloutPath& path) {
    Trajectory traj;
    traj.records.reserve(path.steps.size());
    for (const auto& step : path.steps) {
        const auto c = problem.candidate_at(step.stage, step.soc, step.action.index);
        if (!c) throw RolloutError(step.stage, step.soc);
        traj.records.push_back(make_record(problem.stage(step.stage), *c, problem.evaluate_candidate(step.stage, *c)));
    }
    traj.terminal_cost = path.terminal_cost;
    return traj;
}

/// Engine operating points binned by speed and torque. Points outside the edges fall
/// into the nearest edge bin, so counts always sum to the number of records.
struct OperatingHistogram {
    std::vector<double> speed_edges;
    std::vector<double> torque_edges;
    std::vector<std::size_t> counts;  // row-major by speed bin

    static OperatingHistogram with_default_edges() {
        return {linspace(600.0, 4400.0, 20), linspace(0.0, 3000.0, 16), {}};
    }

    std::size_t speed_bins() const { return speed_edges.size() - 1; }
    std::size_t torque_bins() const { return torque_edges.size() - 1; }
    std::size_t at(std::size_t is, std::size_t it) const { return counts[is * torque_bins() + it]; }

    std::size_t total() const {
        std::size_t n = 0;
        for (auto c : counts) n += c;
        return n;
    }

    static std::size_t bin_of(const std::vector<double>& edges, double x) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        const auto pos = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(pos, 0, static_cast<std::ptrdiff_t>(edges.size()) - 2));
    }

    void fill(const Trajectory& traj) {
        counts.assign(speed_bins() * torque_bins(), 0);
        for (const auto& r : traj.records) {
            ++counts[bin_of(speed_edges, r.ne) * torque_bins() + bin_of(torque_edges, r.te)];
        }
    }
};

struct PatternStats {
    std::size_t stages = 0;
    double fuel_grams = 0.0;
    double mean_j1_bar = 0.0;
    double mean_j2_bar = 0.0;
    double mean_j3_bar = 0.0;
    double cost = 0.0;
};

struct RunSummary {
    std::string strategy;
    std::string cycle_source;
    std::size_t stages = 0;
    double fuel_density = 835.0;
    double total_fuel_l = 0.0;
    double soc_initial = 0.0;
    double soc0 = 0.5;
    double final_soc = 0.0;
    double soc_drift = 0.0;          // |final_soc - soc0|
    double total_composite = 0.0;
    double terminal_cost = 0.0;
    std::array<PatternStats, 3> per_pattern{};
    OperatingHistogram histogram = OperatingHistogram::with_default_edges();
    std::vector<std::string> violations;
};

inline RunSummary summarize(const Trajectory& traj, std::string strategy, double soc0, double fuel_density) {
    RunSummary s;
    s.strategy = std::move(strategy);
    s.stages = traj.records.size();
    s.fuel_density = fuel_density;
    s.total_fuel_l = traj.fuel_liters(fuel_density);
    s.soc0 = soc0;
    s.soc_initial = traj.records.empty() ? soc0 : traj.records.front().soc;
    s.final_soc = traj.records.empty() ? soc0 : traj.final_soc();
    s.soc_drift = std::abs(s.final_soc - soc0);
    s.total_composite = traj.composite_cost();
    s.terminal_cost = traj.terminal_cost;
    for (const auto& r : traj.records) {
        auto& ps = s.per_pattern[index_of(r.pattern)];
        ++ps.stages;
        ps.fuel_grams += r.fuel * r.dt;
        ps.mean_j1_bar += r.j1_bar;
        ps.mean_j2_bar += r.j2_bar;
        ps.mean_j3_bar += r.j3_bar;
        ps.cost += r.stage_cost;
    }
    for (auto& ps : s.per_pattern) {
        if (ps.stages == 0) continue;
        const double n = static_cast<double>(ps.stages);
        ps.mean_j1_bar /= n;
        ps.mean_j2_bar /= n;
        ps.mean_j3_bar /= n;
    }
    s.histogram.fill(traj);
    return s;
}

/// Invariant checks on a finished trajectory; each failure is one human-readable line.
inline std::vector<std::string> check_trajectory(const Trajectory& traj, double soc_min, double soc_max) {
    std::vector<std::string> out;
    constexpr double eps = 1e-9;
    for (std::size_t i = 0; i < traj.records.size(); ++i) {
        const auto& r = traj.records[i];
        if (r.soc < soc_min - eps || r.soc > soc_max + eps || r.soc_next < soc_min - eps || r.soc_next > soc_max + eps) {
            out.push_back("row " + std::to_string(i + 1) + ": SOC outside [" + std::to_string(soc_min) + ", " +
                          std::to_string(soc_max) + "]");
        }
        if (i > 0 && std::abs(traj.records[i - 1].soc_next - r.soc) > eps) {
            out.push_back("row " + std::to_string(i + 1) + ": SOC does not continue from the previous row");
        }
    }
    return out;
}

}  // namespace emt
