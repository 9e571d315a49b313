#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emt/errors.hpp"
#include "emt/objectives.hpp"
#include "emt/patterns.hpp"

namespace emt::ahp {

/// Square pairwise-comparison matrix, row-major.
class JudgmentMatrix {
public:
    JudgmentMatrix() = default;

    JudgmentMatrix(std::size_t n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
        if (n_ == 0) throw ShapeError("judgment matrix order must be at least 1");
        if (entries_.size() != n_ * n_) throw ShapeError("judgment matrix is not square");
    }

    JudgmentMatrix(std::initializer_list<std::initializer_list<double>> rows) {
        n_ = rows.size();
        for (const auto& row : rows) {
            if (row.size() != n_) throw ShapeError("judgment matrix is not square");
            entries_.insert(entries_.end(), row.begin(), row.end());
        }
        if (n_ == 0) throw ShapeError("judgment matrix order must be at least 1");
    }

    static JudgmentMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        std::vector<double> flat;
        for (const auto& row : rows) {
            if (row.size() != rows.size()) throw ShapeError("judgment matrix is not square");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return JudgmentMatrix(rows.size(), std::move(flat));
    }

    std::size_t order() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
    std::span<const double> entries() const { return entries_; }

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
};

inline constexpr double kReciprocalTolerance = 1e-9;

/// Checks a_ii = 1, a_ij > 0, a_ji = 1/a_ij. Throws ValidationError with the 1-based locus.
inline const JudgmentMatrix& validate(const JudgmentMatrix& m) {
    const std::size_t n = m.order();
    if (n == 0) throw ShapeError("judgment matrix order must be at least 1");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = m(i, j);
            if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("entry must be positive and finite", i + 1, j + 1);
            if (i == j && std::abs(a - 1.0) > kReciprocalTolerance) {
                throw ValidationError("diagonal entry must be 1", i + 1, j + 1);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m(j, i) - 1.0 / m(i, j)) > kReciprocalTolerance) {
                throw ValidationError("reciprocity violated", i + 1, j + 1);
            }
        }
    }
    return m;
}

struct SumMethodResult {
    std::vector<double> weights;
    double lambda_max = 0.0;
};

/// Column-normalize, sum rows, renormalize; lambda is the mean of (A·theta)_i / theta_i.
inline SumMethodResult sum_method(const JudgmentMatrix& m) {
    const std::size_t n = m.order();
    std::vector<double> col_sum(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) col_sum[j] += m(i, j);
    }
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[i] += m(i, j) / col_sum[j];
    }
    double total = 0.0;
    for (double r : row) total += r;

    SumMethodResult out;
    out.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.weights[i] = row[i] / total;

    double lambda = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a_theta = 0.0;
        for (std::size_t j = 0; j < n; ++j) a_theta += m(i, j) * out.weights[j];
        lambda += a_theta / out.weights[i];
    }
    out.lambda_max = lambda / static_cast<double>(n);
    return out;
}

/// Mean random consistency index for orders 1..15.
inline constexpr std::array<double, 15> kRandomIndex{0.0,  0.0,  0.58, 0.9,  1.12, 1.24, 1.32, 1.41,
                                                     1.45, 1.49, 1.52, 1.54, 1.56, 1.58, 1.59};

inline double random_index(std::size_t n) {
    if (n < 1 || n > kRandomIndex.size()) {
        throw UnsupportedOrderError("no random index for order " + std::to_string(n) + " (supported: 1-15)");
    }
    return kRandomIndex[n - 1];
}

inline constexpr double kConsistencyThreshold = 0.1;

struct ConsistencyReport {
    double ci = 0.0;
    double ri = 0.0;
    double cr = 0.0;
    bool pass = true;
};

/// Orders 1 and 2 have RI = 0 and are reported as perfectly consistent (CR = 0).
inline ConsistencyReport consistency(double lambda_max, std::size_t n) {
    ConsistencyReport r;
    r.ri = random_index(n);
    if (n <= 2) {
        r.ci = 0.0;
        r.cr = 0.0;
        r.pass = true;
        return r;
    }
    r.ci = (lambda_max - static_cast<double>(n)) / static_cast<double>(n - 1);
    r.cr = r.ci / r.ri;
    r.pass = r.cr < kConsistencyThreshold;
    return r;
}

/// Combined weights b_i = sum_j a_j * b_i^j. Lower vectors are zero-padded where an
/// element has no association with the upper element.
inline std::vector<double> total_ranking(std::span<const double> upper, std::span<const std::vector<double>> lower) {
    if (upper.size() != lower.size()) {
        throw ShapeError("total ranking: " + std::to_string(upper.size()) + " upper weights but " +
                         std::to_string(lower.size()) + " lower vectors");
    }
    if (lower.empty()) throw ShapeError("total ranking needs at least one upper element");
    const std::size_t n = lower.front().size();
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < upper.size(); ++j) {
        if (lower[j].size() != n) throw ShapeError("total ranking: lower vectors differ in length");
        for (std::size_t i = 0; i < n; ++i) out[i] += upper[j] * lower[j][i];
    }
    return out;
}

/// Documentation constants for the 1-9 comparison scale. Entries are not checked against it.
struct ScaleLevel {
    int value;
    std::string_view meaning;
};

inline constexpr std::array<ScaleLevel, 5> kComparisonScale{{
    {1, "equal importance"},
    {3, "slightly more important"},
    {5, "obviously more important"},
    {7, "strongly more important"},
    {9, "extremely more important"},
}};
// 2, 4, 6, 8 are intermediate judgments.

/// Bundled judgment matrices over (economy, driving reserve, generating reserve).
inline JudgmentMatrix bundled_matrix(DrivingPattern p) {
    switch (p) {
        case DrivingPattern::LowSpeed:
            return {{1.0, 1.0 / 5.0, 1.0 / 9.0}, {5.0, 1.0, 1.0 / 7.0}, {9.0, 7.0, 1.0}};
        case DrivingPattern::MediumSpeed:
            return {{1.0, 5.0, 9.0}, {1.0 / 5.0, 1.0, 3.0}, {1.0 / 9.0, 1.0 / 3.0, 1.0}};
        case DrivingPattern::HighSpeed:
            return {{1.0, 1.0 / 9.0, 1.0 / 3.0}, {9.0, 1.0, 7.0}, {3.0, 1.0 / 7.0, 1.0}};
    }
    throw DomainError("unknown driving pattern");
}

/// Runtime weight constants per pattern.
inline PatternWeights weight_constants(DrivingPattern p) {
    switch (p) {
        case DrivingPattern::LowSpeed: return {0.05, 0.29, 0.66};
        case DrivingPattern::MediumSpeed: return {0.67, 0.27, 0.06};
        case DrivingPattern::HighSpeed: return {0.15, 0.78, 0.07};
    }
    throw DomainError("unknown driving pattern");
}

/// Priority vectors and eigenvalues as originally reported for the bundled matrices.
/// Kept as reference metadata only: recomputing them from the matrices gives different
/// numbers (and the low-speed vector has its last two components swapped relative to
/// weight_constants).
struct ReportedPriorities {
    std::array<double, 3> vector;
    double lambda_max;
};

inline ReportedPriorities reported_priorities(DrivingPattern p) {
    switch (p) {
        case DrivingPattern::LowSpeed: return {{0.05, 0.66, 0.29}, 3.08};
        case DrivingPattern::MediumSpeed: return {{0.67, 0.27, 0.06}, 3.03};
        case DrivingPattern::HighSpeed: return {{0.15, 0.78, 0.07}, 3.08};
    }
    throw DomainError("unknown driving pattern");
}

enum class WeightMode { Constants, Recompute };

inline WeightMode parse_weight_mode(std::string_view s) {
    if (s == "constants") return WeightMode::Constants;
    if (s == "recompute") return WeightMode::Recompute;
    throw ConfigError("weights.mode must be 'constants' or 'recompute', got '" + std::string(s) + "'");
}

inline std::string_view to_string(WeightMode m) { return m == WeightMode::Constants ? "constants" : "recompute"; }

struct PatternWeightsResult {
    PatternWeights weights;
    std::optional<SumMethodResult> sum_method;
    std::optional<ConsistencyReport> consistency;
    std::optional<std::string> warning;
};

inline PatternWeightsResult pattern_weights(DrivingPattern p, WeightMode mode = WeightMode::Constants) {
    PatternWeightsResult out;
    if (mode == WeightMode::Constants) {
        out.weights = weight_constants(p);
        return out;
    }
    const JudgmentMatrix m = bundled_matrix(p);
    validate(m);
    auto sm = sum_method(m);
    auto report = consistency(sm.lambda_max, m.order());
    out.weights = {sm.weights[0], sm.weights[1], sm.weights[2]};
    if (!report.pass) {
        out.warning = "consistency ratio " + std::to_string(report.cr) + " is not below 0.1";
    }
    out.sum_method = std::move(sm);
    out.consistency = report;
    return out;
}

/// Weights for all three patterns, indexed by index_of(pattern).
inline std::array<PatternWeights, 3> all_pattern_weights(WeightMode mode = WeightMode::Constants) {
    std::array<PatternWeights, 3> out{};
    for (auto p : kAllPatterns) out[index_of(p)] = pattern_weights(p, mode).weights;
    return out;
}

}  // namespace emt::ahp
