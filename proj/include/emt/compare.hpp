#pragma once

// Side-by-side comparison of two trajectories and the plain-text run report.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "emt/errors.hpp"
#include "emt/io.hpp"
#include "emt/patterns.hpp"
#include "emt/trajectory.hpp"

namespace emt {

using nlohmann::json;

/// Relative fuel saving of cand over ref in percent; positive when cand uses less.
inline double fuel_improvement_percent(double ref_liters, double cand_liters) {
    if (ref_liters == cand_liters) return 0.0;
    if (ref_liters == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (ref_liters - cand_liters) / ref_liters * 100.0;
}

inline double round_to_decimals(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(x * scale) / scale;
}

/// Throws ParseError at the first row whose time or speed differs.
inline void check_same_cycle(const Trajectory& a, const Trajectory& b) {
    if (a.records.size() != b.records.size()) {
        throw ParseError("trajectories cover different cycles: " + std::to_string(a.records.size()) + " vs " +
                             std::to_string(b.records.size()) + " stages",
                         std::min(a.records.size(), b.records.size()) + 2);
    }
    constexpr double tol = 1e-9;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& ra = a.records[i];
        const auto& rb = b.records[i];
        if (std::abs(ra.t - rb.t) > tol) throw ParseError("trajectories cover different cycles (time)", i + 2, 1);
        if (std::abs(ra.v_kmh - rb.v_kmh) > tol) throw ParseError("trajectories cover different cycles (speed)", i + 2, 3);
    }
}

struct SideTotals {
    double fuel_l = 0.0;
    double final_soc = 0.0;
    double soc_drift = 0.0;
    double composite = 0.0;
    std::array<PatternStats, 3> per_pattern{};
    OperatingHistogram histogram = OperatingHistogram::with_default_edges();
};

inline SideTotals side_totals(const Trajectory& t, double soc0, double density) {
    const RunSummary s = summarize(t, "", soc0, density);
    return {s.total_fuel_l, s.final_soc, s.soc_drift, s.total_composite, s.per_pattern, s.histogram};
}

struct Comparison {
    SideTotals reference;
    SideTotals candidate;
    double fuel_improvement_pct = 0.0;
    double soc_drift_delta = 0.0;    // candidate - reference
    double composite_delta = 0.0;    // candidate - reference
};

inline Comparison compare_trajectories(const Trajectory& reference, const Trajectory& candidate, double soc0,
                                       double density) {
    check_same_cycle(reference, candidate);
    Comparison c;
    c.reference = side_totals(reference, soc0, density);
    c.candidate = side_totals(candidate, soc0, density);
    c.fuel_improvement_pct = fuel_improvement_percent(c.reference.fuel_l, c.candidate.fuel_l);
    c.soc_drift_delta = c.candidate.soc_drift - c.reference.soc_drift;
    c.composite_delta = c.candidate.composite - c.reference.composite;
    return c;
}

namespace detail {

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json side_json(const SideTotals& s, double density) {
    json pp = json::object();
    for (auto p : kAllPatterns) {
        const auto& st = s.per_pattern[index_of(p)];
        pp[std::string(to_string(p))] = {{"stages", st.stages}, {"fuel_l", st.fuel_grams / density}, {"cost", st.cost}};
    }
    return {{"fuel_l", s.fuel_l},
            {"final_soc", s.final_soc},
            {"soc_drift", s.soc_drift},
            {"composite", s.composite},
            {"per_pattern", pp}};
}

}  // namespace detail

inline json to_json(const Comparison& c, double density) {
    json per = json::object();
    for (auto p : kAllPatterns) {
        const auto& r = c.reference.per_pattern[index_of(p)];
        const auto& k = c.candidate.per_pattern[index_of(p)];
        per[std::string(to_string(p))] = {
            {"fuel_improvement_pct",
             detail::number_or_null(fuel_improvement_percent(r.fuel_grams / density, k.fuel_grams / density))},
            {"cost_delta", k.cost - r.cost}};
    }
    return {{"reference", detail::side_json(c.reference, density)},
            {"candidate", detail::side_json(c.candidate, density)},
            {"fuel_improvement_pct", detail::number_or_null(c.fuel_improvement_pct)},
            {"fuel_improvement_pct_1dp", detail::number_or_null(round_to_decimals(c.fuel_improvement_pct, 1))},
            {"soc_drift_delta", c.soc_drift_delta},
            {"composite_delta", c.composite_delta},
            {"per_pattern", per}};
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct ReportInput {
    RunSummary summary;
    Trajectory trajectory;
    double soc_min = 0.3;
    double soc_max = 0.8;
};

/// Every recorded violation plus a fresh check of the trajectory against its summary.
inline std::vector<std::string> report_violations(const ReportInput& in) {
    std::vector<std::string> out = in.summary.violations;
    for (auto& v : check_trajectory(in.trajectory, in.soc_min, in.soc_max)) out.push_back(std::move(v));
    const RunSummary fresh = summarize(in.trajectory, in.summary.strategy, in.summary.soc0, in.summary.fuel_density);
    const auto mismatch = [&](const char* what, double a, double b) {
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b))) {
            out.push_back(std::string("summary ") + what + " " + io::format_number(b) +
                          " does not match the trajectory (" + io::format_number(a) + ")");
        }
    };
    if (fresh.stages != in.summary.stages) {
        out.push_back("summary stage count " + std::to_string(in.summary.stages) + " does not match the trajectory (" +
                      std::to_string(fresh.stages) + ")");
    }
    mismatch("total fuel", fresh.total_fuel_l, in.summary.total_fuel_l);
    mismatch("final SOC", fresh.final_soc, in.summary.final_soc);
    // The trajectory file carries stage costs only; add the summary's terminal cost back.
    mismatch("composite cost", fresh.total_composite + in.summary.terminal_cost, in.summary.total_composite);
    return out;
}

namespace detail {

inline std::string fixed(double x, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, x);
    return buf;
}

}  // namespace detail

/// Markdown section for a compare.json document.
inline std::string render_comparison(const json& c) {
    using detail::fixed;
    std::string out = "## Comparison\n\n| quantity | reference | candidate |\n|---|---|---|\n";
    const auto row = [&](const char* label, const char* key, int prec) {
        out += std::string("| ") + label + " | " + fixed(c.at("reference").at(key).get<double>(), prec) + " | " +
               fixed(c.at("candidate").at(key).get<double>(), prec) + " |\n";
    };
    row("fuel (L)", "fuel_l", 4);
    row("final SOC", "final_soc", 4);
    row("abs(SOC_end - SOC0)", "soc_drift", 4);
    row("composite", "composite", 4);
    const auto& pct = c.at("fuel_improvement_pct");
    out += "\nFuel improvement: " + (pct.is_null() ? std::string("n/a") : fixed(pct.get<double>(), 1) + " %") + "\n";
    out += "Composite delta (candidate - reference): " + fixed(c.at("composite_delta").get<double>(), 4) + "\n";
    return out;
}

inline std::string render_report(const ReportInput& in, const std::vector<std::string>& violations,
                                 const json* comparison = nullptr) {
    using detail::fixed;
    const auto& s = in.summary;
    const auto f = [](double x, int prec = 6) { return fixed(x, prec); };
    std::string out;
    out += "# Run report: " + s.strategy + "\n\n";
    out += "| quantity | value |\n|---|---|\n";
    out += "| cycle | " + s.cycle_source + " |\n";
    out += "| stages | " + std::to_string(s.stages) + " |\n";
    out += "| total fuel (L) | " + f(s.total_fuel_l, 4) + " |\n";
    out += "| initial SOC | " + f(s.soc_initial, 4) + " |\n";
    out += "| final SOC | " + f(s.final_soc, 4) + " |\n";
    out += "| abs(SOC_end - SOC0) | " + f(s.soc_drift, 4) + " |\n";
    out += "| composite cost | " + f(s.total_composite, 4) + " |\n\n";
    out += "## Per pattern\n\n| pattern | stages | fuel (g) | mean j1 | mean j2 | mean j3 | cost |\n|---|---|---|---|---|---|---|\n";
    for (auto p : kAllPatterns) {
        const auto& st = s.per_pattern[index_of(p)];
        out += "| " + std::string(to_string(p)) + " | " + std::to_string(st.stages) + " | " + f(st.fuel_grams, 1) + " | " +
               f(st.mean_j1_bar, 4) + " | " + f(st.mean_j2_bar, 4) + " | " + f(st.mean_j3_bar, 4) + " | " +
               f(st.cost, 3) + " |\n";
    }
    if (comparison) out += "\n" + render_comparison(*comparison);
    out += "\n## Violations\n\n";
    if (violations.empty()) {
        out += "none\n";
    } else {
        for (const auto& v : violations) out += "- VIOLATION: " + v + "\n";
    }
    return out;
}

}  // namespace emt
