#pragma once

// Backward dynamic programming over a one-dimensional SOC grid.
//
// A problem exposes, per stage k, a finite indexed action set. evaluate(k, soc, a)
// returns the stage cost and successor SOC of action a, or nullopt when a is infeasible
// at that state. The cost-to-go is stored on grid nodes and linearly interpolated for
// off-grid successors; successors outside the grid are the problem's responsibility to
// reject.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "emt/errors.hpp"

namespace emt::dp {

struct SocGrid {
    double lo = 0.3;
    double hi = 0.8;
    std::size_t count = 101;

    static SocGrid uniform(double lo, double hi, std::size_t count) {
        if (count < 2) throw ConfigError("SOC grid needs at least two nodes");
        if (!(lo < hi)) throw ConfigError("SOC grid bounds must satisfy lo < hi");
        return {lo, hi, count};
    }

    double step() const { return (hi - lo) / static_cast<double>(count - 1); }

    double node(std::size_t i) const { return i + 1 == count ? hi : lo + step() * static_cast<double>(i); }

    bool contains(double soc) const { return soc >= lo - kEdgeTolerance && soc <= hi + kEdgeTolerance; }

    std::size_t snap(double soc) const {
        const double pos = std::round((soc - lo) / step());
        return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(count - 1)));
    }

    /// Piecewise-linear interpolation of a value row; exact on nodes.
    double interpolate(std::span<const double> row, double soc) const {
        const double pos = std::clamp((soc - lo) / step(), 0.0, static_cast<double>(count - 1));
        const double nearest = std::round(pos);
        if (std::abs(pos - nearest) <= kNodeSnap) return row[static_cast<std::size_t>(nearest)];
        const std::size_t i = std::min(static_cast<std::size_t>(pos), count - 2);
        const double t = pos - static_cast<double>(i);
        return (1.0 - t) * row[i] + t * row[i + 1];
    }

    static constexpr double kEdgeTolerance = 1e-12;
    static constexpr double kNodeSnap = 1e-9;
};

struct ActionOutcome {
    double cost = 0.0;
    double next_soc = 0.0;
    double fuel = 0.0;     // tie-break key
    double abs_ps = 0.0;   // tie-break key
    std::size_t index = 0;
};

template <class P>
concept StageProblem = requires(const P& p, std::size_t k, double soc, std::size_t a) {
    { p.stage_count() } -> std::convertible_to<std::size_t>;
    { p.grid() } -> std::convertible_to<SocGrid>;
    { p.action_count(k) } -> std::convertible_to<std::size_t>;
    { p.evaluate(k, soc, a) } -> std::same_as<std::optional<ActionOutcome>>;
    { p.terminal_cost(soc) } -> std::convertible_to<double>;
};

/// Visits every feasible action at (k, soc) in index order. Problems may provide a
/// faster batched member with the same contract.
template <StageProblem P, class Fn>
void for_each_feasible(const P& p, std::size_t k, double soc, Fn&& fn) {
    if constexpr (requires { p.for_each_feasible(k, soc, fn); }) {
        p.for_each_feasible(k, soc, fn);
    } else {
        const std::size_t n = p.action_count(k);
        for (std::size_t a = 0; a < n; ++a) {
            if (auto o = p.evaluate(k, soc, a)) fn(*o);
        }
    }
}

struct Choice {
    ActionOutcome outcome;
    double total = 0.0;  // stage cost + interpolated cost-to-go
};

/// Strict ordering: total, then fuel, then |ps|, then action index.
inline bool better(const Choice& a, const Choice& b) {
    if (a.total != b.total) return a.total < b.total;
    if (a.outcome.fuel != b.outcome.fuel) return a.outcome.fuel < b.outcome.fuel;
    if (a.outcome.abs_ps != b.outcome.abs_ps) return a.outcome.abs_ps < b.outcome.abs_ps;
    return a.outcome.index < b.outcome.index;
}

template <StageProblem P>
std::optional<Choice> best_action(const P& p, std::size_t k, double soc, std::span<const double> next_row) {
    std::optional<Choice> best;
    const SocGrid grid = p.grid();
    for_each_feasible(p, k, soc, [&](const ActionOutcome& o) {
        Choice c{o, o.cost + grid.interpolate(next_row, o.next_soc)};
        if (!best || better(c, *best)) best = c;
    });
    return best;
}

struct SolverOptions {
    double infeasible_penalty = 1e6;
    unsigned threads = 1;
};

class ValueTable {
public:
    ValueTable() = default;
    ValueTable(SocGrid grid, std::size_t stages)
        : grid_(grid), stages_(stages), values_((stages + 1) * grid.count, 0.0) {}

    const SocGrid& grid() const { return grid_; }
    std::size_t stages() const { return stages_; }
    std::size_t nodes() const { return grid_.count; }

    double at(std::size_t k, std::size_t i) const { return values_[k * grid_.count + i]; }
    double& at(std::size_t k, std::size_t i) { return values_[k * grid_.count + i]; }

    std::span<const double> row(std::size_t k) const { return {values_.data() + k * grid_.count, grid_.count}; }

    /// Cost-to-go at an arbitrary SOC in stage k.
    double value(std::size_t k, double soc) const { return grid_.interpolate(row(k), soc); }

private:
    SocGrid grid_{};
    std::size_t stages_ = 0;
    std::vector<double> values_;
};

class Policy {
public:
    static constexpr std::int64_t kInfeasible = -1;

    Policy() = default;
    Policy(std::size_t stages, std::size_t nodes) : nodes_(nodes), actions_(stages * nodes, kInfeasible) {}

    std::size_t stages() const { return nodes_ ? actions_.size() / nodes_ : 0; }
    std::size_t nodes() const { return nodes_; }
    std::int64_t at(std::size_t k, std::size_t i) const { return actions_[k * nodes_ + i]; }
    std::int64_t& at(std::size_t k, std::size_t i) { return actions_[k * nodes_ + i]; }

private:
    std::size_t nodes_ = 0;
    std::vector<std::int64_t> actions_;
};

struct Solution {
    ValueTable values;
    Policy policy;
};

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
}

}  // namespace detail

/// Fills V[N] with the terminal cost, then V[k][i] = min_a { r + V[k+1](soc') } for
/// k = N-1 .. 0. Nodes without a feasible action get the infeasible penalty.
template <StageProblem P>
Solution backward_solve(const P& p, const SolverOptions& opts = {}) {
    const SocGrid grid = p.grid();
    const std::size_t stages = p.stage_count();
    Solution sol{ValueTable(grid, stages), Policy(stages, grid.count)};
    for (std::size_t i = 0; i < grid.count; ++i) sol.values.at(stages, i) = p.terminal_cost(grid.node(i));

    for (std::size_t k = stages; k-- > 0;) {
        const auto next_row = sol.values.row(k + 1);
        detail::parallel_for(grid.count, opts.threads, [&](std::size_t i) {
            const auto best = best_action(p, k, grid.node(i), next_row);
            if (best) {
                sol.values.at(k, i) = best->total;
                sol.policy.at(k, i) = static_cast<std::int64_t>(best->outcome.index);
            } else {
                sol.values.at(k, i) = opts.infeasible_penalty;
                sol.policy.at(k, i) = Policy::kInfeasible;
            }
        });
    }
    return sol;
}

/// Largest |V[k][i] - min_a { r + V[k+1](soc') }| over the table.
template <StageProblem P>
double max_bellman_residual(const P& p, const Solution& sol, const SolverOptions& opts = {}) {
    const SocGrid grid = p.grid();
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.values.stages(); ++k) {
        for (std::size_t i = 0; i < grid.count; ++i) {
            const auto best = best_action(p, k, grid.node(i), sol.values.row(k + 1));
            const double expected = best ? best->total : opts.infeasible_penalty;
            worst = std::max(worst, std::abs(sol.values.at(k, i) - expected));
        }
    }
    return worst;
}

struct RolloutStep {
    std::size_t stage = 0;
    double soc = 0.0;
    ActionOutcome action;
};

struct RolloutPath {
    std::vector<RolloutStep> steps;
    double stage_cost_sum = 0.0;
    double terminal_cost = 0.0;
    double final_soc = 0.0;

    double total() const { return stage_cost_sum + terminal_cost; }
};

/// Forward pass from an arbitrary SOC, re-minimizing against the interpolated
/// cost-to-go at every (generally off-grid) state.
template <StageProblem P>
RolloutPath rollout(const P& p, const Solution& sol, double x0) {
    const SocGrid grid = p.grid();
    if (!grid.contains(x0)) throw DomainError("initial SOC outside the grid");
    RolloutPath path;
    double soc = x0;
    for (std::size_t k = 0; k < p.stage_count(); ++k) {
        const auto best = best_action(p, k, soc, sol.values.row(k + 1));
        if (!best) throw RolloutError(k, soc);
        path.steps.push_back({k, soc, best->outcome});
        path.stage_cost_sum += best->outcome.cost;
        soc = best->outcome.next_soc;
    }
    path.final_soc = soc;
    path.terminal_cost = p.terminal_cost(soc);
    return path;
}

/// Forward simulation with an arbitrary chooser over the feasible outcomes at each state.
/// The chooser returns a position into the span it is given.
template <StageProblem P, class Chooser>
RolloutPath forward_simulate(const P& p, double x0, Chooser&& choose) {
    RolloutPath path;
    double soc = x0;
    std::vector<ActionOutcome> options;
    for (std::size_t k = 0; k < p.stage_count(); ++k) {
        options.clear();
        for_each_feasible(p, k, soc, [&](const ActionOutcome& o) { options.push_back(o); });
        if (options.empty()) throw RolloutError(k, soc);
        const std::size_t pick = choose(k, std::span<const ActionOutcome>(options));
        const ActionOutcome o = options.at(pick);
        path.steps.push_back({k, soc, o});
        path.stage_cost_sum += o.cost;
        soc = o.next_soc;
    }
    path.final_soc = soc;
    path.terminal_cost = p.terminal_cost(soc);
    return path;
}

inline constexpr double kBruteForceLimit = 1e7;

/// Exhaustive enumeration of action-index sequences from start_soc, with successor SOC
/// snapped to the nearest grid node. A path that reaches a state with no feasible action
/// is charged the infeasible penalty from there on.
template <StageProblem P>
double brute_force_reference(const P& p, double start_soc, const SolverOptions& opts = {},
                             double limit = kBruteForceLimit) {
    const std::size_t stages = p.stage_count();
    const SocGrid grid = p.grid();
    std::vector<std::size_t> counts(stages);
    double combos = 1.0;
    for (std::size_t k = 0; k < stages; ++k) {
        counts[k] = p.action_count(k);
        combos *= static_cast<double>(std::max<std::size_t>(counts[k], 1));
    }
    if (combos > limit) {
        throw SizeGuardError("brute force would enumerate " + std::to_string(combos) + " sequences");
    }

    const auto has_feasible = [&](std::size_t k, double soc) {
        for (std::size_t a = 0; a < counts[k]; ++a) {
            if (p.evaluate(k, soc, a)) return true;
        }
        return false;
    };

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> seq(stages, 0);
    std::vector<double> costs;
    costs.reserve(stages);
    // Summed from the tail, cost_k + (cost_k+1 + (... + tail)), the same association as
    // the backward recursion, so exact agreement is not spoiled by a large penalty term.
    const auto total = [&](double tail) {
        for (auto it = costs.rbegin(); it != costs.rend(); ++it) tail = *it + tail;
        return tail;
    };
    while (true) {
        double soc = grid.node(grid.snap(start_soc));
        costs.clear();
        bool valid = true;
        bool dead_end = false;
        for (std::size_t k = 0; k < stages; ++k) {
            if (!has_feasible(k, soc)) {
                dead_end = true;
                break;
            }
            const auto o = p.evaluate(k, soc, seq[k]);
            if (!o) {
                valid = false;
                break;
            }
            costs.push_back(o->cost);
            soc = grid.node(grid.snap(o->next_soc));
        }
        if (dead_end) {
            best = std::min(best, total(opts.infeasible_penalty));
        } else if (valid) {
            best = std::min(best, total(p.terminal_cost(soc)));
        }

        // odometer increment
        std::size_t k = stages;
        while (k > 0) {
            --k;
            if (++seq[k] < std::max<std::size_t>(counts[k], 1)) break;
            seq[k] = 0;
            if (k == 0) return best;
        }
        if (stages == 0) return best;
    }
}

}  // namespace emt::dp
