#include <gtest/gtest.h>

#include <random>

#include "emt/objectives.hpp"

using namespace emt;

TEST(Objectives, J1Raw) {
    const ObjectiveParams p;
    EXPECT_EQ(j1_raw(0.0, 0.0, 0.5, p), 0.0);
    EXPECT_DOUBLE_EQ(j1_raw(10.0, 0.0005, 0.5, p), 3.75);
    EXPECT_NEAR(j1_raw(72.0, 0.001, 0.8, p), 239.5, 1e-9);
}

TEST(Objectives, J1NormalizerDefaults) {
    const ObjectiveParams p;
    EXPECT_DOUBLE_EQ(p.j1_max(), 239.5);
    EXPECT_DOUBLE_EQ(j1_norm(p.j1_max(), p), 1.0);
    EXPECT_EQ(j1_norm(0.0, p), 0.0);
    EXPECT_NEAR(j1_norm(3.75, p), 0.01566, 1e-5);
}

TEST(Objectives, J1NormalizerMustBePositive) {
    ObjectiveParams p;
    p.gamma1 = -1e6;
    EXPECT_THROW(p.validate(), ConfigError);
    EXPECT_THROW(j1_norm(1.0, p), ConfigError);
}

TEST(Objectives, J2) {
    EXPECT_EQ(j2_raw(500, 220, 0), 720);
    EXPECT_EQ(j2_raw(500, 220, 300), 420);
    EXPECT_EQ(j2_raw(500, 220, 720), 0);
    EXPECT_EQ(j2_norm(500, 220, 0), -1.0);
    EXPECT_EQ(j2_norm(500, 220, 720), 0.0);
    EXPECT_DOUBLE_EQ(j2_norm(500, 220, 360), -0.5);
    EXPECT_THROW(j2_norm(0, 0, 0), ConfigError);
}

TEST(Objectives, J3) {
    EXPECT_EQ(j3_raw(150, 150, 220, 0), 520);
    EXPECT_EQ(j3_raw(150, 150, 220, 100), 420);
    EXPECT_EQ(j3_raw(150, 150, 220, 520), 0);
    EXPECT_EQ(j3_norm(150, 150, 220, 0), -1.0);
    EXPECT_EQ(j3_norm(150, 150, 220, 520), 0.0);
    EXPECT_DOUBLE_EQ(j3_norm(150, 150, 220, 130), -0.75);
    EXPECT_THROW(j3_norm(0, 0, 0, 0), ConfigError);
}

TEST(Objectives, NormalizedReservesIncreaseWithDemand) {
    for (double pd = -50.0; pd < 800.0; pd += 10.0) {
        EXPECT_LT(j2_norm(500, 220, pd), j2_norm(500, 220, pd + 1.0));
        EXPECT_LT(j3_norm(150, 150, 220, pd), j3_norm(150, 150, 220, pd + 1.0));
    }
}

TEST(Objectives, Composite) {
    ObjectiveValues v;
    v.j1_bar = 1.0;
    v.j2_bar = -1.0;
    v.j3_bar = -1.0;
    EXPECT_NEAR(composite({0.67, 0.27, 0.06}, v), 0.34, 1e-12);
    EXPECT_EQ(composite({0.2, 0.3, 0.5}, ObjectiveValues{}), 0.0);
    v.j1_bar = 0.123;
    EXPECT_EQ(composite({1.0, 0.0, 0.0}, v), 0.123);
}

TEST(Objectives, CompositeIsLinear) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const PatternWeights w{0.15, 0.78, 0.07};
    for (int i = 0; i < 100; ++i) {
        ObjectiveValues v;
        v.j1_bar = u(rng);
        v.j2_bar = u(rng);
        v.j3_bar = u(rng);
        const double s = 3.0 * u(rng);
        ObjectiveValues sv = v;
        sv.j1_bar *= s;
        sv.j2_bar *= s;
        sv.j3_bar *= s;
        EXPECT_NEAR(composite(w, sv), s * composite(w, v), 1e-12);
    }
}

TEST(Objectives, ZeroGamma2MakesJ1IndependentOfSoc) {
    ObjectiveParams p;
    p.gamma2 = 0.0;
    const double ref = j1_raw(20.0, 0.0003, 0.3, p);
    for (double soc = 0.3; soc <= 0.8; soc += 0.01) EXPECT_EQ(j1_raw(20.0, 0.0003, soc, p), ref);
}

TEST(Objectives, WeightValidation) {
    EXPECT_NO_THROW((PatternWeights{0.05, 0.29, 0.66}.validate()));
    EXPECT_THROW((PatternWeights{0.5, 0.5, 0.5}.validate()), ConfigError);
    EXPECT_THROW((PatternWeights{-0.1, 0.6, 0.5}.validate()), ConfigError);
}
