#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "emt/ahp.hpp"
#include "emt/dp.hpp"
#include "emt/drive_cycle.hpp"
#include "emt/emt_problem.hpp"
#include "emt/errors.hpp"
#include "emt/interp.hpp"
#include "emt/patterns.hpp"
#include "emt/powertrain.hpp"
#include "emt/trajectory.hpp"

namespace emt::io {

// ---------------------------------------------------------------------------
// Text helpers
// ---------------------------------------------------------------------------

/// Shortest decimal form that parses back to the same double.
inline std::string format_number(double x) {
    if (x == 0.0) return "0";  // also folds -0
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Non-empty lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        const auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        ++lineno;
        if (!trim(line).empty()) out.emplace_back(lineno, line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> try_number(std::string_view field) {
    field = trim(field);
    if (field.empty()) return std::nullopt;
    if (field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) return std::nullopt;
    return v;
}

inline double parse_number(std::string_view field, std::size_t row, std::size_t col) {
    auto v = try_number(field);
    if (!v) throw ParseError("non-numeric field '" + std::string(field) + "'", row, col);
    return *v;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// ---------------------------------------------------------------------------
// Drive cycle
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 4> kCycleColumns{"t_s", "v_kmh", "f", "pc_kw"};

inline DriveCycle parse_cycle(std::string_view text, bool dt_tolerant = false) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ParseError("empty cycle file", 1);
    const auto header = split(lines.front().second);
    for (std::size_t c = 0; c < kCycleColumns.size(); ++c) {
        if (c >= header.size() || header[c] != kCycleColumns[c]) {
            throw ParseError("missing column '" + std::string(kCycleColumns[c]) + "'", lines.front().first, c + 1);
        }
    }
    if (header.size() != kCycleColumns.size()) {
        throw ParseError("unexpected extra column", lines.front().first, kCycleColumns.size() + 1);
    }
    DriveCycle cycle;
    std::vector<std::size_t> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [lineno, line] = lines[i];
        const auto fields = split(line);
        if (fields.size() != kCycleColumns.size()) {
            throw ParseError("expected 4 fields, found " + std::to_string(fields.size()), lineno);
        }
        CyclePoint p;
        p.t = parse_number(fields[0], lineno, 1);
        p.v = parse_number(fields[1], lineno, 2);
        p.f = parse_number(fields[2], lineno, 3);
        p.pc = parse_number(fields[3], lineno, 4);
        cycle.points.push_back(p);
        rows.push_back(lineno);
    }
    try {
        cycle.validate(dt_tolerant);
    } catch (const ParseError& e) {
        // validate() counts data rows; translate to file lines
        const std::size_t idx = e.row() - 1;
        std::string msg = e.what();
        msg = msg.substr(msg.find(": ") + 2);
        throw ParseError(msg, idx < rows.size() ? rows[idx] : e.row(), e.col());
    }
    return cycle;
}

inline std::string emit_cycle(const DriveCycle& cycle) {
    std::string out = "t_s,v_kmh,f,pc_kw\n";
    for (const auto& p : cycle.points) {
        out += format_number(p.t) + ',' + format_number(p.v) + ',' + format_number(p.f) + ',' + format_number(p.pc) + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Component maps and curves
// ---------------------------------------------------------------------------

/// Grid CSV: cell (1,1) blank, first row = x (speed) grid, first column = y (torque) grid.
inline Table2D parse_table(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.size() < 3) throw ParseError("map needs a grid row and at least two body rows", lines.empty() ? 1 : lines.back().first);
    Table2D t;
    const auto head = split(lines.front().second);
    if (head.empty() || !head[0].empty()) throw ParseError("first cell of a map must be blank", lines.front().first, 1);
    for (std::size_t c = 1; c < head.size(); ++c) {
        const double x = parse_number(head[c], lines.front().first, c + 1);
        if (!t.xs.empty() && !(x > t.xs.back())) {
            throw ParseError("speed grid is not strictly increasing", lines.front().first, c + 1);
        }
        t.xs.push_back(x);
    }
    if (t.xs.size() < 2) throw ParseError("speed grid needs at least two nodes", lines.front().first);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [lineno, line] = lines[i];
        const auto fields = split(line);
        if (fields.size() != head.size()) {
            throw ParseError("ragged row: expected " + std::to_string(head.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             lineno);
        }
        const double y = parse_number(fields[0], lineno, 1);
        if (!t.ys.empty() && !(y > t.ys.back())) throw ParseError("torque grid is not strictly increasing", lineno, 1);
        t.ys.push_back(y);
        for (std::size_t c = 1; c < fields.size(); ++c) t.values.push_back(parse_number(fields[c], lineno, c + 1));
    }
    return t;
}

inline std::string emit_table(const Table2D& t) {
    std::string out;
    for (double x : t.xs) out += ',' + format_number(x);
    out += '\n';
    for (std::size_t iy = 0; iy < t.ny(); ++iy) {
        out += format_number(t.ys[iy]);
        for (std::size_t ix = 0; ix < t.nx(); ++ix) out += ',' + format_number(t.node(ix, iy));
        out += '\n';
    }
    return out;
}

/// Two-column curve; a non-numeric first line is treated as a header.
inline Curve1D parse_curve(std::string_view text) {
    const auto lines = lines_of(text);
    Curve1D c;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto [lineno, line] = lines[i];
        const auto fields = split(line);
        if (fields.size() != 2) throw ParseError("curve rows need exactly 2 fields", lineno);
        if (i == 0 && !try_number(fields[0])) continue;
        const double x = parse_number(fields[0], lineno, 1);
        if (!c.xs.empty() && !(x > c.xs.back())) throw ParseError("curve abscissa is not strictly increasing", lineno, 1);
        c.xs.push_back(x);
        c.ys.push_back(parse_number(fields[1], lineno, 2));
    }
    if (c.xs.size() < 2) throw ParseError("curve needs at least two points", lines.empty() ? 1 : lines.back().first);
    return c;
}

inline std::string emit_curve(const Curve1D& c) {
    std::string out;
    for (std::size_t i = 0; i < c.xs.size(); ++i) out += format_number(c.xs[i]) + ',' + format_number(c.ys[i]) + '\n';
    return out;
}

inline EngineMap parse_engine_map(std::string_view fuel_csv, std::string_view max_torque_csv) {
    EngineMap m{parse_table(fuel_csv), parse_curve(max_torque_csv)};
    m.validate();
    return m;
}

inline MachineMap parse_machine_map(std::string_view efficiency_csv, std::string_view max_power_csv) {
    MachineMap m{parse_table(efficiency_csv), parse_curve(max_power_csv)};
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 22> kTrajectoryColumns{
    "t_s",     "dt_s",   "v_kmh", "pattern", "soc",   "soc_next", "ne_rpm",  "te_nm",
    "ta_nm",   "tb_nm",  "ps_kw", "pa_kw",   "pb_kw", "pe_kw",    "pd_kw",   "pc_kw",
    "fuel_gps", "j1_bar", "j2_bar", "j3_bar", "stage_cost", "cum_cost"};

inline std::string write_trajectory(const Trajectory& traj) {
    std::string out;
    for (std::size_t c = 0; c < kTrajectoryColumns.size(); ++c) {
        if (c) out += ',';
        out += kTrajectoryColumns[c];
    }
    out += '\n';
    double cum = 0.0;
    for (const auto& r : traj.records) {
        cum += r.stage_cost;
        const double nums_a[] = {r.t, r.dt, r.v_kmh};
        const double nums_b[] = {r.soc, r.soc_next, r.ne, r.te, r.ta, r.tb, r.ps, r.pa, r.pb, r.pe,
                                 r.pd,  r.pc,       r.fuel, r.j1_bar, r.j2_bar, r.j3_bar, r.stage_cost, cum};
        for (double x : nums_a) out += format_number(x) + ',';
        out += to_string(r.pattern);
        for (double x : nums_b) out += ',' + format_number(x);
        out += '\n';
    }
    return out;
}

inline Trajectory parse_trajectory(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ParseError("empty trajectory file", 1);
    const auto header = split(lines.front().second);
    if (header.size() != kTrajectoryColumns.size()) {
        throw ParseError("trajectory header has " + std::to_string(header.size()) + " columns, expected " +
                             std::to_string(kTrajectoryColumns.size()),
                         lines.front().first);
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] != kTrajectoryColumns[c]) {
            throw ParseError("expected column '" + std::string(kTrajectoryColumns[c]) + "'", lines.front().first, c + 1);
        }
    }
    Trajectory traj;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [lineno, line] = lines[i];
        const auto f = split(line);
        if (f.size() != kTrajectoryColumns.size()) throw ParseError("wrong field count", lineno);
        auto num = [&](std::size_t c) { return parse_number(f[c], lineno, c + 1); };
        TrajectoryRecord r;
        r.t = num(0);
        r.dt = num(1);
        r.v_kmh = num(2);
        try {
            r.pattern = parse_pattern(f[3]);
        } catch (const DomainError&) {
            throw ParseError("unknown pattern '" + std::string(f[3]) + "'", lineno, 4);
        }
        r.soc = num(4);
        r.soc_next = num(5);
        r.ne = num(6);
        r.te = num(7);
        r.ta = num(8);
        r.tb = num(9);
        r.ps = num(10);
        r.pa = num(11);
        r.pb = num(12);
        r.pe = num(13);
        r.pd = num(14);
        r.pc = num(15);
        r.fuel = num(16);
        r.j1_bar = num(17);
        r.j2_bar = num(18);
        r.j3_bar = num(19);
        r.stage_cost = num(20);
        traj.records.push_back(r);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Summary JSON
// ---------------------------------------------------------------------------

using nlohmann::json;

inline json to_json(const RunSummary& s) {
    json j;
    j["strategy"] = s.strategy;
    j["cycle_source"] = s.cycle_source;
    j["stages"] = s.stages;
    j["fuel_density_g_per_l"] = s.fuel_density;
    j["total_fuel_l"] = s.total_fuel_l;
    j["soc_initial"] = s.soc_initial;
    j["soc0"] = s.soc0;
    j["final_soc"] = s.final_soc;
    j["soc_drift"] = s.soc_drift;
    j["total_composite"] = s.total_composite;
    j["terminal_cost"] = s.terminal_cost;
    json pp = json::object();
    for (auto p : kAllPatterns) {
        const auto& st = s.per_pattern[index_of(p)];
        pp[std::string(to_string(p))] = {{"stages", st.stages},           {"fuel_g", st.fuel_grams},
                                         {"mean_j1_bar", st.mean_j1_bar}, {"mean_j2_bar", st.mean_j2_bar},
                                         {"mean_j3_bar", st.mean_j3_bar}, {"cost", st.cost}};
    }
    j["per_pattern"] = pp;
    j["histogram"] = {{"speed_edges_rpm", s.histogram.speed_edges},
                      {"torque_edges_nm", s.histogram.torque_edges},
                      {"counts", s.histogram.counts}};
    j["violations"] = s.violations;
    return j;
}

inline RunSummary summary_from_json(const json& j) {
    try {
        RunSummary s;
        s.strategy = j.at("strategy").get<std::string>();
        s.cycle_source = j.at("cycle_source").get<std::string>();
        s.stages = j.at("stages").get<std::size_t>();
        s.fuel_density = j.at("fuel_density_g_per_l").get<double>();
        s.total_fuel_l = j.at("total_fuel_l").get<double>();
        s.soc_initial = j.at("soc_initial").get<double>();
        s.soc0 = j.at("soc0").get<double>();
        s.final_soc = j.at("final_soc").get<double>();
        s.soc_drift = j.at("soc_drift").get<double>();
        s.total_composite = j.at("total_composite").get<double>();
        s.terminal_cost = j.at("terminal_cost").get<double>();
        for (auto p : kAllPatterns) {
            const auto& pj = j.at("per_pattern").at(std::string(to_string(p)));
            auto& st = s.per_pattern[index_of(p)];
            st.stages = pj.at("stages").get<std::size_t>();
            st.fuel_grams = pj.at("fuel_g").get<double>();
            st.mean_j1_bar = pj.at("mean_j1_bar").get<double>();
            st.mean_j2_bar = pj.at("mean_j2_bar").get<double>();
            st.mean_j3_bar = pj.at("mean_j3_bar").get<double>();
            st.cost = pj.at("cost").get<double>();
        }
        s.histogram.speed_edges = j.at("histogram").at("speed_edges_rpm").get<std::vector<double>>();
        s.histogram.torque_edges = j.at("histogram").at("torque_edges_nm").get<std::vector<double>>();
        s.histogram.counts = j.at("histogram").at("counts").get<std::vector<std::size_t>>();
        s.violations = j.at("violations").get<std::vector<std::string>>();
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("summary: ") + e.what(), 0);
    }
}

/// Summary JSON. Extra top-level blocks (effective config, solver stats) may be merged in
/// by the caller; they survive a parse/emit cycle only through the raw json.
inline std::string write_summary(const RunSummary& s, const json& extra = json::object()) {
    json j = to_json(s);
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j.dump(2) + "\n";
}

inline json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what(), 0);
    }
}

inline RunSummary parse_summary(std::string_view text) { return summary_from_json(parse_json(text, "summary")); }

/// One row per bin at its centre: speed_rpm,torque_nm,count.
inline std::string write_histogram(const OperatingHistogram& h) {
    std::string out = "speed_rpm,torque_nm,count\n";
    for (std::size_t is = 0; is < h.speed_bins(); ++is) {
        const double n = 0.5 * (h.speed_edges[is] + h.speed_edges[is + 1]);
        for (std::size_t it = 0; it < h.torque_bins(); ++it) {
            const double t = 0.5 * (h.torque_edges[it] + h.torque_edges[it + 1]);
            out += format_number(n) + ',' + format_number(t) + ',' + std::to_string(h.at(is, it)) + '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Judgment matrices
// ---------------------------------------------------------------------------

/// Square CSV of positive entries; "a/b" fractions are accepted. Validated.
inline ahp::JudgmentMatrix parse_judgment_matrix(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ParseError("empty matrix file", 1);
    std::vector<std::vector<double>> rows;
    for (const auto& [lineno, line] : lines) {
        const auto fields = split(line);
        std::vector<double> row;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto slash = fields[c].find('/');
            if (slash == std::string_view::npos) {
                row.push_back(parse_number(fields[c], lineno, c + 1));
            } else {
                const double num = parse_number(fields[c].substr(0, slash), lineno, c + 1);
                const double den = parse_number(fields[c].substr(slash + 1), lineno, c + 1);
                if (den == 0.0) throw ParseError("zero denominator", lineno, c + 1);
                row.push_back(num / den);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("ragged matrix row", lineno);
        rows.push_back(std::move(row));
    }
    if (rows.size() != rows.front().size()) {
        throw ParseError("matrix is " + std::to_string(rows.size()) + "x" + std::to_string(rows.front().size()) +
                             ", expected square",
                         lines.back().first);
    }
    auto m = ahp::JudgmentMatrix::from_rows(rows);
    ahp::validate(m);
    return m;
}

// ---------------------------------------------------------------------------
// Solver outputs
// ---------------------------------------------------------------------------

inline std::string write_policy_csv(const EmtProblem& problem, const dp::Solution& sol) {
    std::string out = "stage,node,soc,action,ne_rpm,ta_nm,tb_nm,value\n";
    const auto& grid = problem.grid();
    const auto& ag = problem.action_grid();
    for (std::size_t k = 0; k < sol.policy.stages(); ++k) {
        for (std::size_t i = 0; i < grid.count; ++i) {
            const auto a = sol.policy.at(k, i);
            out += std::to_string(k) + ',' + std::to_string(i) + ',' + format_number(grid.node(i)) + ',' +
                   std::to_string(a);
            if (a >= 0) {
                const auto d = ag.decode(static_cast<std::size_t>(a));
                out += ',' + format_number(ag.ne[d.ine]) + ',' + format_number(ag.ta[d.ita]) + ',' +
                       format_number(ag.tb[d.itb]);
            } else {
                out += ",,,";
            }
            out += ',' + format_number(sol.values.at(k, i)) + '\n';
        }
    }
    return out;
}

inline constexpr char kPolicyMagic[8] = {'E', 'M', 'T', 'P', 'O', 'L', '1', '\0'};

/// Binary policy: magic, uint32 stages, uint32 nodes, then stages*nodes int32 action
/// indices (-1 infeasible), then the (stages+1)*nodes float64 value table. Little-endian.
inline std::string write_policy_binary(const dp::Solution& sol) {
    std::string out(kPolicyMagic, sizeof kPolicyMagic);
    const auto put = [&](const void* p, std::size_t n) { out.append(static_cast<const char*>(p), n); };
    const std::uint32_t stages = static_cast<std::uint32_t>(sol.policy.stages());
    const std::uint32_t nodes = static_cast<std::uint32_t>(sol.policy.nodes());
    put(&stages, 4);
    put(&nodes, 4);
    for (std::size_t k = 0; k < stages; ++k) {
        for (std::size_t i = 0; i < nodes; ++i) {
            const std::int32_t a = static_cast<std::int32_t>(sol.policy.at(k, i));
            put(&a, 4);
        }
    }
    for (std::size_t k = 0; k <= stages; ++k) {
        for (std::size_t i = 0; i < nodes; ++i) {
            const double v = sol.values.at(k, i);
            put(&v, 8);
        }
    }
    return out;
}

inline json value_table_summary(const EmtProblem& problem, const dp::Solution& sol) {
    const auto& grid = problem.grid();
    std::size_t infeasible = 0;
    for (std::size_t k = 0; k < sol.policy.stages(); ++k) {
        for (std::size_t i = 0; i < grid.count; ++i) infeasible += sol.policy.at(k, i) == dp::Policy::kInfeasible;
    }
    std::vector<double> v0(sol.values.row(0).begin(), sol.values.row(0).end());
    return {{"stages", sol.values.stages()},
            {"soc_nodes", grid.count},
            {"soc_min", grid.lo},
            {"soc_max", grid.hi},
            {"actions_per_stage", problem.action_grid().size()},
            {"infeasible_entries", infeasible},
            {"infeasible_penalty", problem.config().infeasible_penalty},
            {"v0_at_soc_init", sol.values.value(0, problem.model().battery.soc_init)},
            {"v0", v0}};
}

}  // namespace emt::io
