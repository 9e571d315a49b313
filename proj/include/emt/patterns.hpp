#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emt/drive_cycle.hpp"
#include "emt/errors.hpp"

namespace emt {

/// Speed-band driving pattern. Ordered: Low < Medium < High.
enum class DrivingPattern : int { LowSpeed = 0, MediumSpeed = 1, HighSpeed = 2 };

inline constexpr std::array<DrivingPattern, 3> kAllPatterns{DrivingPattern::LowSpeed, DrivingPattern::MediumSpeed,
                                                            DrivingPattern::HighSpeed};

inline constexpr double kMediumSpeedFloor = 35.0;  // km/h
inline constexpr double kHighSpeedFloor = 60.0;    // km/h

inline constexpr std::size_t index_of(DrivingPattern p) { return static_cast<std::size_t>(p); }

inline std::string_view to_string(DrivingPattern p) {
    switch (p) {
        case DrivingPattern::LowSpeed: return "low";
        case DrivingPattern::MediumSpeed: return "medium";
        case DrivingPattern::HighSpeed: return "high";
    }
    return "unknown";
}

inline DrivingPattern parse_pattern(std::string_view name) {
    if (name == "low") return DrivingPattern::LowSpeed;
    if (name == "medium") return DrivingPattern::MediumSpeed;
    if (name == "high") return DrivingPattern::HighSpeed;
    throw DomainError("unknown driving pattern '" + std::string(name) + "' (expected low|medium|high)");
}

/// Half-open bands: [0, 35) low, [35, 60) medium, [60, inf) high.
inline DrivingPattern classify_speed(double v_kmh) {
    if (!(v_kmh >= 0.0)) throw DomainError("speed must be non-negative, got " + std::to_string(v_kmh));
    if (v_kmh < kMediumSpeedFloor) return DrivingPattern::LowSpeed;
    if (v_kmh < kHighSpeedFloor) return DrivingPattern::MediumSpeed;
    return DrivingPattern::HighSpeed;
}

struct PatternSegment {
    std::size_t start_index = 0;  // inclusive
    std::size_t end_index = 0;    // exclusive
    DrivingPattern pattern = DrivingPattern::LowSpeed;

    std::size_t length() const { return end_index - start_index; }
    bool operator==(const PatternSegment&) const = default;
};

inline std::vector<PatternSegment> segment_labels(std::span<const DrivingPattern> labels) {
    std::vector<PatternSegment> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (out.empty() || out.back().pattern != labels[i]) {
            out.push_back({i, i + 1, labels[i]});
        } else {
            out.back().end_index = i + 1;
        }
    }
    return out;
}

inline std::vector<DrivingPattern> classify_cycle(const DriveCycle& cycle) {
    std::vector<DrivingPattern> labels;
    labels.reserve(cycle.size());
    for (const auto& p : cycle.points) labels.push_back(classify_speed(p.v));
    return labels;
}

/// Run-length segmentation of per-stage classifications.
inline std::vector<PatternSegment> segment_cycle(const DriveCycle& cycle) {
    if (cycle.empty()) throw DomainError("cannot segment an empty cycle");
    const auto labels = classify_cycle(cycle);
    return segment_labels(labels);
}

/// Optional smoothing: segments shorter than min_length are absorbed by the preceding
/// segment (the following one for a leading short segment), then equal neighbours merge.
inline std::vector<PatternSegment> merge_short_segments(std::vector<PatternSegment> segments, std::size_t min_length) {
    if (min_length <= 1 || segments.size() <= 1) return segments;
    bool changed = true;
    while (changed && segments.size() > 1) {
        changed = false;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (segments[i].length() >= min_length) continue;
            if (i > 0) {
                segments[i - 1].end_index = segments[i].end_index;
            } else {
                segments[1].start_index = segments[0].start_index;
            }
            segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(i));
            changed = true;
            break;
        }
        std::vector<PatternSegment> merged;
        for (const auto& s : segments) {
            if (!merged.empty() && merged.back().pattern == s.pattern) {
                merged.back().end_index = s.end_index;
            } else {
                merged.push_back(s);
            }
        }
        segments = std::move(merged);
    }
    return segments;
}

/// Per-stage labels reconstructed from a segmentation.
inline std::vector<DrivingPattern> expand_segments(std::span<const PatternSegment> segments) {
    std::vector<DrivingPattern> out;
    for (const auto& s : segments) out.insert(out.end(), s.length(), s.pattern);
    return out;
}

}  // namespace emt
