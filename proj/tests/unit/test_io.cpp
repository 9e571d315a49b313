#include <gtest/gtest.h>

#include <cmath>

#include "emt/emt.hpp"

using namespace emt;

namespace {

template <class Fn>
ParseError parse_error_of(Fn&& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "no ParseError thrown";
    return ParseError("none", 0);
}

DriveCycle slice(const DriveCycle& c, std::size_t from, std::size_t n) {
    DriveCycle out;
    for (std::size_t i = 0; i < n; ++i) {
        auto p = c[from + i];
        p.t = static_cast<double>(i);
        out.points.push_back(p);
    }
    return out;
}

}  // namespace

TEST(CycleIo, ParsesThreeRows) {
    const auto c = io::parse_cycle("t_s,v_kmh,f,pc_kw\n0,0,0.01,5\n1,10.5,0.02,6\n2,20,0.015,7.25\n");
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[1], (CyclePoint{1.0, 10.5, 0.02, 6.0}));
    EXPECT_EQ(c[2].pc, 7.25);
}

TEST(CycleIo, NegativeSpeedReportsRow) {
    const auto e = parse_error_of([] { io::parse_cycle("t_s,v_kmh,f,pc_kw\n0,0,0.01,5\n1,-1,0.02,6\n"); });
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.col(), 2u);
    EXPECT_NE(std::string(e.what()).find("negative speed"), std::string::npos);
}

TEST(CycleIo, MissingColumnIsNamed) {
    const auto e = parse_error_of([] { io::parse_cycle("t_s,v_kmh,f\n0,0,0.01\n"); });
    EXPECT_EQ(e.row(), 1u);
    EXPECT_NE(std::string(e.what()).find("pc_kw"), std::string::npos);
}

TEST(CycleIo, TimeMustIncrease) {
    const auto e = parse_error_of([] { io::parse_cycle("t_s,v_kmh,f,pc_kw\n0,0,0,0\n1,0,0,0\n1,0,0,0\n", true); });
    EXPECT_EQ(e.row(), 4u);
    EXPECT_THROW(io::parse_cycle("t_s,v_kmh,f,pc_kw\n0,0,0,0\n2,0,0,0\n"), ParseError);
    EXPECT_NO_THROW(io::parse_cycle("t_s,v_kmh,f,pc_kw\n0,0,0,0\n2,0,0,0\n", true));
}

TEST(CycleIo, RejectsGarbage) {
    EXPECT_THROW(io::parse_cycle(""), ParseError);
    EXPECT_THROW(io::parse_cycle("t_s,v_kmh,f,pc_kw\n0,abc,0,0\n"), ParseError);
    EXPECT_THROW(io::parse_cycle("t_s,v_kmh,f,pc_kw\n0,1,0\n"), ParseError);
}

TEST(CycleIo, RoundTripIsByteStable) {
    const auto c = synth_cycle();
    const auto text = io::emit_cycle(c);
    const auto back = io::parse_cycle(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(io::emit_cycle(back), text);
}

TEST(CycleIo, SyntheticCycleShape) {
    const auto c = synth_cycle();
    EXPECT_EQ(c.size(), 1486u);
    EXPECT_NO_THROW(c.validate());
    std::array<std::size_t, 3> counts{};
    for (auto p : classify_cycle(c)) ++counts[index_of(p)];
    for (auto n : counts) EXPECT_GE(n, 200u);
    EXPECT_EQ(io::emit_cycle(synth_cycle()), io::emit_cycle(c));
    EXPECT_NE(io::emit_cycle(synth_cycle(7)), io::emit_cycle(c));
}

TEST(MapIo, ParsesTwoByTwo) {
    const auto t = io::parse_table(",1000,2000\n0,1.5,2.5\n100,3.5,4.5\n");
    EXPECT_EQ(t.xs, (std::vector<double>{1000, 2000}));
    EXPECT_EQ(t.ys, (std::vector<double>{0, 100}));
    EXPECT_EQ(t.node(1, 0), 2.5);
    EXPECT_EQ(t.node(0, 1), 3.5);
}

TEST(MapIo, RejectsBadGrids) {
    const auto dup = parse_error_of([] { io::parse_table(",1000,1000\n0,1,2\n100,3,4\n"); });
    EXPECT_EQ(dup.row(), 1u);
    EXPECT_EQ(dup.col(), 3u);
    EXPECT_THROW(io::parse_table(",1000,2000\n0,1,2\n100,3\n"), ParseError);
    EXPECT_THROW(io::parse_table("x,1000,2000\n0,1,2\n100,3,4\n"), ParseError);
    EXPECT_THROW(io::parse_curve("0,1\n"), ParseError);
    EXPECT_THROW(io::parse_curve("speed,torque\n0,1\n0,2\n"), ParseError);
}

TEST(MapIo, RoundTripsSyntheticMaps) {
    const auto model = default_powertrain();
    for (const Table2D* t : {&model.engine.fuel, &model.machine_a.efficiency}) {
        const auto text = io::emit_table(*t);
        const auto back = io::parse_table(text);
        EXPECT_EQ(back.xs, t->xs);
        EXPECT_EQ(back.ys, t->ys);
        EXPECT_EQ(back.values, t->values);
        EXPECT_EQ(io::emit_table(back), text);
    }
    const auto text = io::emit_curve(model.engine.max_torque);
    const auto back = io::parse_curve("speed_rpm,torque_nm\n" + text);
    EXPECT_EQ(back.xs, model.engine.max_torque.xs);
    EXPECT_EQ(io::emit_curve(back), text);
    EXPECT_NO_THROW(io::parse_engine_map(io::emit_table(model.engine.fuel), text));
}

TEST(TrajectoryIo, EmptyTrajectoryIsHeaderOnly) {
    const auto text = io::write_trajectory(Trajectory{});
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
    EXPECT_TRUE(io::parse_trajectory(text).records.empty());
}

TEST(TrajectoryIo, RoundTripAndTotals) {
    const auto model = default_powertrain();
    const EmtProblem p(slice(synth_cycle(), 250, 60), model, ahp::all_pattern_weights(), ObjectiveParams{}, DpConfig{});
    const auto run = run_dp(p);
    const auto text = io::write_trajectory(run.trajectory);
    const auto back = io::parse_trajectory(text);
    ASSERT_EQ(back.records.size(), run.trajectory.records.size());
    for (std::size_t i = 0; i < back.records.size(); ++i) EXPECT_EQ(back.records[i], run.trajectory.records[i]);
    EXPECT_EQ(io::write_trajectory(back), text);

    const auto summary_text = io::write_summary(run.summary);
    const auto s = io::parse_summary(summary_text);
    EXPECT_EQ(io::write_summary(s), summary_text);
    double grams = 0.0;
    for (const auto& r : back.records) grams += r.fuel * r.dt;
    EXPECT_NEAR(s.total_fuel_l, grams / s.fuel_density, 1e-9);
    EXPECT_NEAR(s.final_soc, back.records.back().soc_next, 1e-9);
    EXPECT_EQ(s.stages, back.records.size());
    EXPECT_EQ(s.histogram.total(), back.records.size());
    std::size_t per = 0;
    for (const auto& ps : s.per_pattern) per += ps.stages;
    EXPECT_EQ(per, back.records.size());
}

TEST(TrajectoryIo, RejectsWrongHeader) {
    EXPECT_THROW(io::parse_trajectory("t_s,dt_s\n"), ParseError);
    auto text = io::write_trajectory(Trajectory{});
    text += "0,1,0,warp,0.5,0.5,1000,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n";
    const auto e = parse_error_of([&] { io::parse_trajectory(text); });
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.col(), 4u);
}

TEST(HistogramIo, CountsSumToStages) {
    Trajectory t;
    for (int i = 0; i < 37; ++i) {
        TrajectoryRecord r;
        r.ne = 500.0 + 120.0 * i;
        r.te = 90.0 * i;
        t.records.push_back(r);
    }
    auto h = OperatingHistogram::with_default_edges();
    h.fill(t);
    EXPECT_EQ(h.total(), 37u);
    const auto csv = io::write_histogram(h);
    std::size_t sum = 0;
    const auto lines = io::lines_of(csv);
    for (std::size_t i = 1; i < lines.size(); ++i) sum += static_cast<std::size_t>(std::stoul(std::string(io::split(lines[i].second)[2])));
    EXPECT_EQ(sum, 37u);
}

TEST(MatrixIo, ParsesFractions) {
    const auto m = io::parse_judgment_matrix("1,1/3,5\n3,1,7\n1/5,1/7,1\n");
    EXPECT_EQ(m.order(), 3u);
    EXPECT_DOUBLE_EQ(m(0, 1), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(m(2, 1), 1.0 / 7.0);
    EXPECT_THROW(io::parse_judgment_matrix("1,2\n0.5,1\n1,1\n"), ParseError);
    EXPECT_THROW(io::parse_judgment_matrix("1,1/0\n1,1\n"), ParseError);
    EXPECT_THROW(io::parse_judgment_matrix("1,2\n3,1\n"), ValidationError);
}

TEST(NumberFormat, ShortestRoundTrip) {
    for (double x : {0.0, 1.0, -2.5, 0.1, 1e-17, 123456.789, 0.30000000000000004}) {
        EXPECT_EQ(std::stod(io::format_number(x)), x);
    }
    EXPECT_EQ(io::format_number(0.0), "0");
    EXPECT_EQ(io::format_number(-0.0), "0");
}
