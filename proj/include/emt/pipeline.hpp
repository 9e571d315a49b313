#pragma once

// End-to-end runs: configuration + cycle -> problem -> DP or rule trajectory + summary.

#include <chrono>
#include <string>
#include <utility>

#include "emt/ahp.hpp"
#include "emt/baseline.hpp"
#include "emt/config.hpp"
#include "emt/dp.hpp"
#include "emt/emt_problem.hpp"
#include "emt/trajectory.hpp"

namespace emt {

inline EmtProblem make_problem(const RunConfig& cfg, const DriveCycle& cycle) {
    return EmtProblem(cycle, load_powertrain(cfg), ahp::all_pattern_weights(cfg.weight_mode), cfg.objectives, cfg.dp);
}

struct DpRun {
    dp::Solution solution;
    dp::RolloutPath path;
    Trajectory trajectory;
    RunSummary summary;
    double solve_seconds = 0.0;
};

inline RunSummary finish_summary(const EmtProblem& problem, const Trajectory& traj, std::string strategy) {
    const auto& batt = problem.model().battery;
    RunSummary s = summarize(traj, std::move(strategy), problem.params().soc0, problem.model().vehicle.fuel_density);
    s.violations = check_trajectory(traj, batt.soc_min, batt.soc_max);
    return s;
}

/// threads = 0 uses the configured dp.threads.
inline DpRun run_dp(const EmtProblem& problem, unsigned threads = 0) {
    DpRun run;
    const dp::SolverOptions opts{problem.config().infeasible_penalty, threads ? threads : problem.config().threads};
    const auto t0 = std::chrono::steady_clock::now();
    run.solution = dp::backward_solve(problem, opts);
    run.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.path = dp::rollout(problem, run.solution, problem.model().battery.soc_init);
    run.trajectory = build_trajectory(problem, run.path);
    run.summary = finish_summary(problem, run.trajectory, "dp");
    return run;
}

struct BaselineRun {
    RuleRun rule;
    RunSummary summary;
};

inline BaselineRun run_baseline(const EmtProblem& problem, const RuleConfig& cfg) {
    BaselineRun run;
    run.rule = simulate_rule(problem, cfg, problem.model().battery.soc_init);
    run.summary = finish_summary(problem, run.rule.trajectory, "rule");
    return run;
}

}  // namespace emt
