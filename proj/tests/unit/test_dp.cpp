#include <gtest/gtest.h>

#include <random>

#include "emt/dp.hpp"
#include "support/oracles.hpp"

using namespace emt;
using emt::testing::TabularProblem;

namespace {

/// Every action at every node stays put and costs costs[k][a].
TabularProblem flat(std::size_t nodes, const std::vector<std::vector<double>>& costs) {
    TabularProblem p;
    p.grid_ = dp::SocGrid::uniform(0.3, 0.8, nodes);
    for (const auto& row : costs) {
        p.shift.emplace_back(row.size(), 0);
        p.cost.emplace_back(nodes, row);
    }
    return p;
}

/// Two actions with identical cost but different fuel / |ps| / index, for tie-breaking.
struct TieProblem {
    dp::SocGrid grid_{0.3, 0.8, 3};
    std::vector<dp::ActionOutcome> outcomes;

    std::size_t stage_count() const { return 1; }
    const dp::SocGrid& grid() const { return grid_; }
    std::size_t action_count(std::size_t) const { return outcomes.size(); }
    std::optional<dp::ActionOutcome> evaluate(std::size_t, double soc, std::size_t a) const {
        auto o = outcomes[a];
        o.next_soc = soc;
        return o;
    }
    double terminal_cost(double) const { return 0.0; }
};

}  // namespace

TEST(SocGrid, NodesAndInterpolation) {
    const auto g = dp::SocGrid::uniform(0.3, 0.8, 101);
    EXPECT_EQ(g.node(0), 0.3);
    EXPECT_EQ(g.node(100), 0.8);
    for (std::size_t i = 1; i < g.count; ++i) EXPECT_GT(g.node(i), g.node(i - 1));
    std::vector<double> row(101);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<double>(i * i);
    for (std::size_t i = 0; i < row.size(); ++i) EXPECT_EQ(g.interpolate(row, g.node(i)), row[i]);
    EXPECT_DOUBLE_EQ(g.interpolate(row, 0.5 * (g.node(10) + g.node(11))), 0.5 * (100.0 + 121.0));
    EXPECT_THROW(dp::SocGrid::uniform(0.3, 0.8, 1), ConfigError);
}

TEST(Dp, SingleStageSingleAction) {
    const auto p = flat(4, {{2.5}});
    const auto sol = dp::backward_solve(p);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(sol.values.at(0, i), 2.5);
    const auto path = dp::rollout(p, sol, p.grid().node(2));
    ASSERT_EQ(path.steps.size(), 1u);
    EXPECT_EQ(path.total(), 2.5);
    EXPECT_EQ(dp::brute_force_reference(p, p.grid().node(1)), 2.5);
}

TEST(Dp, SeparableTwoStages) {
    const auto p = flat(3, {{1.0, 2.0}, {3.0, 0.0}});
    const auto sol = dp::backward_solve(p);
    EXPECT_EQ(sol.values.at(0, 1), 1.0);
    EXPECT_EQ(sol.policy.at(0, 1), 0);
    EXPECT_EQ(sol.policy.at(1, 1), 1);
}

TEST(Dp, EqualCostsSumAlongAnyPath) {
    const auto p = flat(4, {{0.7, 0.7, 0.7}, {0.7, 0.7, 0.7}, {0.7, 0.7, 0.7}});
    EXPECT_NEAR(dp::brute_force_reference(p, 0.3), 2.1, 1e-15);
    EXPECT_NEAR(dp::backward_solve(p).values.at(0, 0), 2.1, 1e-15);
}

TEST(Dp, MatchesBruteForceOnRandomInstances) {
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 40; ++trial) {
        const auto p = TabularProblem::random(rng, 5, 4, 6);
        const auto sol = dp::backward_solve(p);
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_NEAR(sol.values.at(0, i), dp::brute_force_reference(p, p.grid().node(i)), 1e-12);
        }
    }
}

TEST(Dp, RolloutFromNodeReproducesValue) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = TabularProblem::random(rng, 5, 4, 6, 0.0);
        const auto sol = dp::backward_solve(p);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto path = dp::rollout(p, sol, p.grid().node(i));
            EXPECT_NEAR(path.total(), sol.values.at(0, i), 1e-12);
        }
    }
}

TEST(Dp, BellmanResidualIsZero) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = TabularProblem::random(rng, 6, 5, 4);
        const auto sol = dp::backward_solve(p);
        EXPECT_LE(dp::max_bellman_residual(p, sol), 1e-12);
    }
}

TEST(Dp, InfeasibleNodesGetPenalty) {
    auto p = flat(3, {{1.0}});
    p.blocked.assign(1, std::vector<std::vector<bool>>(3, std::vector<bool>(1, false)));
    p.blocked[0][2][0] = true;
    const auto sol = dp::backward_solve(p, {123.0, 1});
    EXPECT_EQ(sol.values.at(0, 2), 123.0);
    EXPECT_EQ(sol.policy.at(0, 2), dp::Policy::kInfeasible);
    EXPECT_EQ(sol.values.at(0, 1), 1.0);
    EXPECT_THROW(dp::rollout(p, sol, p.grid().node(2)), RolloutError);
    EXPECT_THROW(dp::rollout(p, sol, 0.95), DomainError);
}

TEST(Dp, BruteForceChargesPenaltyAtDeadEnds) {
    auto p = flat(3, {{1.0}, {2.0}});
    p.shift[0][0] = 1;
    p.blocked.assign(2, std::vector<std::vector<bool>>(3, std::vector<bool>(1, false)));
    p.blocked[1][2][0] = true;
    const dp::SolverOptions opts{1000.0, 1};
    EXPECT_EQ(dp::brute_force_reference(p, p.grid().node(1), opts), 1001.0);
    EXPECT_EQ(dp::backward_solve(p, opts).values.at(0, 1), 1001.0);
}

TEST(Dp, SizeGuard) {
    std::mt19937_64 rng(1);
    const auto p = TabularProblem::random(rng, 10, 4, 6);
    EXPECT_THROW(dp::brute_force_reference(p, 0.3), SizeGuardError);
}

TEST(Dp, TieBreakByFuelThenPsThenIndex) {
    TieProblem p;
    p.outcomes = {{1.0, 0, 5.0, 1.0, 0}, {1.0, 0, 4.0, 3.0, 1}, {1.0, 0, 4.0, 2.0, 2}, {1.0, 0, 4.0, 2.0, 3}};
    const auto sol = dp::backward_solve(p);
    EXPECT_EQ(sol.policy.at(0, 0), 2);
}

TEST(Dp, ThreadedSolveIsIdentical) {
    std::mt19937_64 rng(12);
    const auto p = TabularProblem::random(rng, 8, 9, 5);
    const auto a = dp::backward_solve(p, {1e6, 1});
    const auto b = dp::backward_solve(p, {1e6, 4});
    for (std::size_t k = 0; k <= 8; ++k) {
        for (std::size_t i = 0; i < 9; ++i) {
            EXPECT_EQ(a.values.at(k, i), b.values.at(k, i));
            if (k < 8) EXPECT_EQ(a.policy.at(k, i), b.policy.at(k, i));
        }
    }
}

TEST(Dp, SupersetOfActionsNeverIncreasesValue) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const auto small = TabularProblem::random(rng, 4, 5, 3);
        auto big = small;
        std::uniform_real_distribution<double> c(-1.0, 2.0);
        for (std::size_t k = 0; k < big.stage_count(); ++k) {
            big.shift[k].push_back(static_cast<int>(k % 3) - 1);
            for (std::size_t i = 0; i < 5; ++i) {
                big.cost[k][i].push_back(c(rng));
                big.blocked[k][i].push_back(false);
            }
        }
        const auto vs = dp::backward_solve(small);
        const auto vb = dp::backward_solve(big);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_LE(vb.values.at(0, i), vs.values.at(0, i));
    }
}

TEST(Dp, ForwardSimulateWithChooser) {
    const auto p = flat(3, {{1.0, 2.0}, {3.0, 0.5}});
    const auto path = dp::forward_simulate(p, p.grid().node(1), [](std::size_t, auto opts) { return opts.size() - 1; });
    EXPECT_EQ(path.stage_cost_sum, 2.5);
}
