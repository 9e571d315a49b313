#include <gtest/gtest.h>

#include <random>

#include "emt/patterns.hpp"

using namespace emt;

namespace {

DriveCycle cycle_of(const std::vector<double>& speeds) {
    DriveCycle c;
    for (std::size_t i = 0; i < speeds.size(); ++i) c.points.push_back({static_cast<double>(i), speeds[i], 0.05, 10.0});
    return c;
}

}  // namespace

TEST(Patterns, ClassifyBands) {
    EXPECT_EQ(classify_speed(20.0), DrivingPattern::LowSpeed);
    EXPECT_EQ(classify_speed(72.0), DrivingPattern::HighSpeed);
    EXPECT_EQ(classify_speed(35.0), DrivingPattern::MediumSpeed);
    EXPECT_EQ(classify_speed(0.0), DrivingPattern::LowSpeed);
    EXPECT_EQ(classify_speed(34.99), DrivingPattern::LowSpeed);
    EXPECT_EQ(classify_speed(59.99), DrivingPattern::MediumSpeed);
    EXPECT_EQ(classify_speed(60.0), DrivingPattern::HighSpeed);
    EXPECT_THROW(classify_speed(-0.1), DomainError);
}

TEST(Patterns, ClassifyIsMonotone) {
    DrivingPattern prev = DrivingPattern::LowSpeed;
    for (double v = 0.0; v < 120.0; v += 0.25) {
        const auto p = classify_speed(v);
        EXPECT_GE(index_of(p), index_of(prev));
        prev = p;
    }
}

TEST(Patterns, NamesRoundTrip) {
    for (auto p : kAllPatterns) EXPECT_EQ(parse_pattern(to_string(p)), p);
    EXPECT_THROW(parse_pattern("fast"), DomainError);
}

TEST(Patterns, SegmentExamples) {
    const auto one = segment_cycle(cycle_of(std::vector<double>(10, 20.0)));
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0], (PatternSegment{0, 10, DrivingPattern::LowSpeed}));

    const auto three = segment_cycle(cycle_of({20, 20, 50, 50, 70}));
    ASSERT_EQ(three.size(), 3u);
    EXPECT_EQ(three[0], (PatternSegment{0, 2, DrivingPattern::LowSpeed}));
    EXPECT_EQ(three[1], (PatternSegment{2, 4, DrivingPattern::MediumSpeed}));
    EXPECT_EQ(three[2], (PatternSegment{4, 5, DrivingPattern::HighSpeed}));

    const auto alt = segment_cycle(cycle_of({30, 40, 30, 40, 30, 40}));
    EXPECT_EQ(alt.size(), 6u);

    EXPECT_THROW(segment_cycle(DriveCycle{}), DomainError);
}

TEST(Patterns, SegmentRoundTripOnRandomCycles) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> v(0.0, 90.0);
    std::uniform_int_distribution<int> len(1, 200);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> speeds(static_cast<std::size_t>(len(rng)));
        for (auto& s : speeds) s = v(rng);
        const auto c = cycle_of(speeds);
        const auto segs = segment_cycle(c);
        ASSERT_EQ(expand_segments(segs), classify_cycle(c));
        EXPECT_EQ(segs.front().start_index, 0u);
        EXPECT_EQ(segs.back().end_index, speeds.size());
        for (std::size_t i = 1; i < segs.size(); ++i) {
            EXPECT_EQ(segs[i].start_index, segs[i - 1].end_index);
            EXPECT_NE(segs[i].pattern, segs[i - 1].pattern);
        }
    }
}

TEST(Patterns, MergeShortSegments) {
    const auto segs = segment_cycle(cycle_of({20, 20, 20, 50, 20, 20, 70, 70, 70}));
    EXPECT_EQ(merge_short_segments(segs, 1), segs);
    const auto merged = merge_short_segments(segs, 2);
    ASSERT_EQ(merged.size(), 2u);
    EXPECT_EQ(merged[0], (PatternSegment{0, 6, DrivingPattern::LowSpeed}));
    EXPECT_EQ(merged[1], (PatternSegment{6, 9, DrivingPattern::HighSpeed}));
    EXPECT_EQ(expand_segments(merged).size(), 9u);
}
