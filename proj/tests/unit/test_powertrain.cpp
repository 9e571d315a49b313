#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "emt/powertrain.hpp"
#include "emt/synthetic_maps.hpp"

using namespace emt;

namespace {

EngineMap small_engine() {
    EngineMap m;
    m.fuel = {{0.0, 1000.0, 2000.0}, {0.0, 500.0, 1000.0}, {0, 1, 2, 10, 10, 20, 20, 30, 40}};
    m.max_torque = {{0.0, 1000.0, 2000.0}, {500.0, 500.0, 500.0}};
    m.validate();
    return m;
}

MachineMap small_machine() {
    MachineMap m;
    m.efficiency = {{0.0, 1000.0}, {0.0, 100.0}, {0.70, 0.80, 0.82, 0.92}};
    m.max_power = {{0.0, 100.0, 200.0}, {100.0, 200.0, 200.0}};
    m.validate();
    return m;
}

}  // namespace

TEST(Engine, FuelAtNodesIsExact) {
    const auto m = small_engine();
    for (std::size_t iy = 0; iy < 2; ++iy) {
        for (std::size_t ix = 0; ix < 3; ++ix) {
            EXPECT_EQ(lookup_fuel_rate(m, m.speed_grid()[ix], m.torque_grid()[iy]), m.fuel.node(ix, iy));
        }
    }
}

TEST(Engine, FuelCellCenters) {
    EngineMap m;
    m.fuel = {{0.0, 1.0}, {0.0, 1.0}, {10, 10, 20, 20}};
    m.max_torque = {{0.0, 1.0}, {1.0, 1.0}};
    EXPECT_DOUBLE_EQ(lookup_fuel_rate(m, 0.5, 0.5), 15.0);
    m.fuel.values = {8, 12, 16, 24};
    EXPECT_DOUBLE_EQ(lookup_fuel_rate(m, 0.5, 0.5), 15.0);
}

TEST(Engine, FuelEnvelopeErrorsNameTheBound) {
    const auto m = small_engine();
    try {
        lookup_fuel_rate(m, 2500.0, 100.0);
        FAIL();
    } catch (const EnvelopeError& e) {
        EXPECT_NE(std::string(e.what()).find("speed above"), std::string::npos);
    }
    try {
        lookup_fuel_rate(m, 1000.0, 700.0);
        FAIL();
    } catch (const EnvelopeError& e) {
        EXPECT_NE(std::string(e.what()).find("max-torque"), std::string::npos);
    }
    EXPECT_THROW(lookup_fuel_rate(m, 1000.0, -1.0), EnvelopeError);
}

TEST(Engine, MaxPower) {
    const auto m = small_engine();
    EXPECT_EQ(engine_max_power(m, 0.0), 0.0);
    EXPECT_NEAR(engine_max_power(m, 2000.0), 500.0 * 2000.0 * 2.0 * std::numbers::pi / 60.0 / 1000.0, 1e-12);
    EXPECT_NEAR(engine_max_power(m, 2000.0), 104.72, 0.005);
    EXPECT_THROW(engine_max_power(m, 2100.0), EnvelopeError);
}

TEST(Engine, SyntheticMapMaxFuelEqualsFuelMax) {
    const auto m = synthetic_engine_map(72.0);
    m.validate();
    EXPECT_NEAR(max_feasible_fuel(m), 72.0, 1e-9);
}

TEST(Machine, EfficiencyLookups) {
    const auto m = small_machine();
    EXPECT_EQ(machine_efficiency(m, 1000.0, 100.0), 0.92);
    EXPECT_NEAR(machine_efficiency(m, 500.0, 50.0), 0.81, 1e-12);
    MachineMap sym = m;
    sym.efficiency.values = {0.8, 0.8, 0.9, 0.9};
    EXPECT_NEAR(machine_efficiency(sym, 500.0, 50.0), 0.85, 1e-12);
    EXPECT_THROW(machine_efficiency(m, 1001.0, 0.0), EnvelopeError);
}

TEST(Machine, MaxPowerMagnitudeSymmetric) {
    const auto m = small_machine();
    EXPECT_EQ(machine_max_power(m, 100.0), 200.0);
    EXPECT_DOUBLE_EQ(machine_max_power(m, 50.0), 150.0);
    EXPECT_EQ(machine_max_power(m, -75.0), machine_max_power(m, 75.0));
    EXPECT_THROW(machine_max_power(m, 250.0), EnvelopeError);
}

TEST(Battery, SocStepExamples) {
    const BatteryPack b;
    EXPECT_EQ(battery_soc_step(b, 0.0, 1.0), 0.0);
    EXPECT_NEAR(battery_soc_step(b, 220.0, 1.0), 0.000999, 5e-6);
    EXPECT_LT(battery_soc_step(b, -50.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(battery_soc_step(b, 100.0, 3.0), 3.0 * battery_soc_step(b, 100.0, 1.0));
}

TEST(Battery, SocStepMatchesTextbookForm) {
    const BatteryPack b;
    for (double p : {-200.0, -10.0, 5.0, 150.0}) {
        const double pw = p * 1000.0;
        const double direct = (std::sqrt(b.voc * b.voc + 4.0 * pw * b.rb) - b.voc) / (7200.0 * b.cb * b.rb);
        EXPECT_NEAR(battery_soc_step(b, p, 1.0), direct, 1e-12);
    }
}

TEST(Battery, NegativeDiscriminantIsInfeasible) {
    const BatteryPack b;
    const double limit_kw = b.voc * b.voc / (4.0 * b.rb) / 1000.0;
    EXPECT_THROW(battery_soc_step(b, -limit_kw - 1.0, 1.0), InfeasiblePowerError);
}

TEST(Battery, SocStepStrictlyMonotoneAndSigned) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> voc(300.0, 900.0), rb(0.01, 0.2), cb(20.0, 200.0), u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        BatteryPack b;
        b.voc = voc(rng);
        b.rb = rb(rng);
        b.cb = cb(rng);
        const double pmin = -0.99 * b.voc * b.voc / (4.0 * b.rb) / 1000.0;
        const double p1 = pmin + (300.0 - pmin) * u(rng);
        const double p2 = p1 + 1e-3 + 10.0 * u(rng);
        const double d1 = battery_soc_step(b, p1, 1.0);
        EXPECT_LT(d1, battery_soc_step(b, p2, 1.0));
        EXPECT_EQ(std::signbit(d1), std::signbit(p1));
    }
}

TEST(Battery, MaxDischarge) {
    BatteryPack b;
    EXPECT_EQ(battery_max_discharge(b, b.soc_min), 0.0);
    b.p_lim_curve = {{0.0, 1.0}, {220.0, 220.0}};
    EXPECT_EQ(battery_max_discharge(b, 0.5), 220.0);
    b.p_lim_curve = {{0.4, 0.6}, {100.0, 200.0}};
    EXPECT_DOUBLE_EQ(battery_max_discharge(b, 0.5), 150.0);
}

TEST(Battery, ValidateRejectsCurveAboveLimit) {
    BatteryPack b;
    b.p_lim_curve = {{0.0, 1.0}, {0.0, 300.0}};
    EXPECT_THROW(b.validate(), ConfigError);
    BatteryPack c;
    c.soc_init = 0.9;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Vehicle, DemandedDrivePower) {
    VehicleParams v;
    EXPECT_EQ(demanded_drive_power(v, 0.0, 0.06, 0.0), 0.0);
    v.mass = 40000.0;
    v.gravity = 9.81;
    EXPECT_NEAR(demanded_drive_power(v, 10.0, 0.06, 0.0), 235.44, 1e-9);
    EXPECT_LT(demanded_drive_power(v, 10.0, 0.0, -0.5), 0.0);
}

TEST(Vehicle, ValidateRanges) {
    VehicleParams v;
    v.elec_loss_frac = 0.3;
    EXPECT_THROW(v.validate(), ConfigError);
    VehicleParams w;
    w.mech_path_eff = 0.0;
    EXPECT_THROW(w.validate(), ConfigError);
}

TEST(Balance, Examples) {
    const PowerFlow zero{};
    const auto r0 = power_balance_residuals(zero, 0.9, 0.9, 0.95);
    EXPECT_EQ(r0.elec, 0.0);
    EXPECT_EQ(r0.drive, 0.0);

    PowerFlow f;
    f.ps = -10;
    f.pc = 5;
    f.pl = 1;
    f.pa = 5;
    f.pb = -1;
    EXPECT_EQ(power_balance_residuals(f, 1.0, 1.0, 1.0).elec, 0.0);

    PowerFlow g;
    g.pe = 100;
    g.pd = 80;
    g.pc = 5;
    g.ploss = 2;
    g.ps = 3;
    EXPECT_NEAR(power_balance_residuals(g, 1.0, 1.0, 0.9).drive, 0.0, 1e-12);
}

TEST(Balance, EfficiencyExponentFollowsSign) {
    PowerFlow f;
    f.pa = 10.0;  // motoring draws pa / eta
    EXPECT_DOUBLE_EQ(power_balance_residuals(f, 0.8, 1.0, 1.0).elec, 12.5);
    f.pa = -10.0;  // generating returns pa * eta
    EXPECT_DOUBLE_EQ(power_balance_residuals(f, 0.8, 1.0, 1.0).elec, -8.0);
}

TEST(Balance, LinearInPowerTerms) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        PowerFlow f{u(rng), u(rng), std::abs(u(rng)), u(rng), u(rng), u(rng), u(rng), std::abs(u(rng))};
        PowerFlow d{2 * f.ps, 2 * f.pc, 2 * f.pl, 2 * f.pa, 2 * f.pb, 2 * f.pe, 2 * f.pd, 2 * f.ploss};
        const auto r1 = power_balance_residuals(f, 1.0, 1.0, 1.0);
        const auto r2 = power_balance_residuals(d, 1.0, 1.0, 1.0);
        EXPECT_NEAR(r2.elec, 2 * r1.elec, 1e-9);
        EXPECT_NEAR(r2.drive, 2 * r1.drive, 1e-9);
    }
}

TEST(Model, DefaultPowertrainValidates) {
    const auto m = default_powertrain();
    EXPECT_NO_THROW(m.validate());
    EXPECT_NEAR(battery_soc_step(m.battery, m.battery.p_abs_max, 1.0), 0.001, 0.001 * 0.02);
}
