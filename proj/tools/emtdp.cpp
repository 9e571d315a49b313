// emtdp: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 solve failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emt/emt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kSolve = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json weights_json(const emt::PatternWeights& w) { return json::array({w.alpha1, w.alpha2, w.alpha3}); }

json ahp_json(const emt::ahp::JudgmentMatrix& m) {
    const auto sm = emt::ahp::sum_method(m);
    const auto rep = emt::ahp::consistency(sm.lambda_max, m.order());
    return {{"weights", sm.weights}, {"lambda_max", sm.lambda_max}, {"ci", rep.ci},
            {"ri", rep.ri},          {"cr", rep.cr},                {"pass", rep.pass}};
}

// ---------------------------------------------------------------------------

struct WeightsArgs {
    std::string matrix;
    std::string pattern;
    bool recompute = false;
};

int run_weights(const WeightsArgs& a) {
    if (a.matrix.empty() == a.pattern.empty()) throw UsageError("weights: give exactly one of --matrix or --pattern");
    json out;
    if (!a.matrix.empty()) {
        const auto m = emt::io::parse_judgment_matrix(emt::io::read_file(a.matrix));
        out = ahp_json(m);
        out["source"] = a.matrix;
    } else {
        emt::DrivingPattern p;
        try {
            p = emt::parse_pattern(a.pattern);
        } catch (const emt::DomainError& e) {
            throw UsageError(e.what());
        }
        const auto mode = a.recompute ? emt::ahp::WeightMode::Recompute : emt::ahp::WeightMode::Constants;
        const auto res = emt::ahp::pattern_weights(p, mode);
        out["pattern"] = a.pattern;
        out["mode"] = std::string(emt::ahp::to_string(mode));
        out["weights"] = weights_json(res.weights);
        if (res.sum_method) {
            out["lambda_max"] = res.sum_method->lambda_max;
            out["ci"] = res.consistency->ci;
            out["ri"] = res.consistency->ri;
            out["cr"] = res.consistency->cr;
            out["pass"] = res.consistency->pass;
            out["constants"] = weights_json(emt::ahp::weight_constants(p));
        }
        if (res.warning) {
            out["warning"] = *res.warning;
            std::cerr << "warning: " << *res.warning << "\n";
        }
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct CycleArgs {
    std::string cycle;
    std::string config;
    std::vector<std::string> sets;
};

struct LoadedRun {
    emt::ConfigBuilder builder;
    emt::RunConfig cfg;
    emt::DriveCycle cycle;
    std::string cycle_source;
};

LoadedRun load_run(const CycleArgs& a, std::optional<unsigned> threads) {
    LoadedRun r;
    if (!a.config.empty()) r.builder.merge_text(emt::io::read_file(a.config));
    for (const auto& s : a.sets) {
        try {
            r.builder.set(s);
        } catch (const emt::ConfigError& e) {
            throw UsageError(e.what());
        }
    }
    if (threads) r.builder.set("dp.threads=" + std::to_string(*threads));
    r.cfg = r.builder.build();
    if (a.cycle.empty()) {
        r.cycle = emt::synth_cycle(r.cfg.cycle.seed);
        r.cycle_source = "synthetic (seed " + std::to_string(r.cfg.cycle.seed) +
                         "; generated substitute, not measured data)";
    } else {
        r.cycle = emt::io::parse_cycle(emt::io::read_file(a.cycle), r.cfg.cycle.dt_tolerant);
        r.cycle_source = a.cycle;
    }
    return r;
}

/// Segment rows as CSV: start_s,end_s,pattern with end_s exclusive.
int run_classify(const CycleArgs& a) {
    const auto r = load_run(a, std::nullopt);
    const auto segments = emt::merge_short_segments(emt::segment_cycle(r.cycle), r.cfg.cycle.min_segment_length);
    std::string out = "start_s,end_s,pattern\n";
    for (const auto& s : segments) {
        const double start = r.cycle[s.start_index].t;
        const double end = s.end_index < r.cycle.size() ? r.cycle[s.end_index].t
                                                        : r.cycle.points.back().t + r.cycle.dt(r.cycle.size() - 1);
        out += emt::io::format_number(start) + ',' + emt::io::format_number(end) + ',' +
               std::string(emt::to_string(s.pattern)) + '\n';
    }
    std::cout << out;
    return kOk;
}

// ---------------------------------------------------------------------------

struct RunArgs {
    CycleArgs cycle;
    std::string out;
    std::optional<unsigned> threads;
    std::string policy_format = "csv";
};

void write_common(const fs::path& out, const LoadedRun& r, const emt::Trajectory& traj) {
    emt::io::write_file((out / "trajectory.csv").string(), emt::io::write_trajectory(traj));
    if (r.cycle_source.rfind("synthetic", 0) == 0) {
        emt::io::write_file((out / "cycle.csv").string(), emt::io::emit_cycle(r.cycle));
    }
}

int run_solve(const RunArgs& a) {
    const auto r = load_run(a.cycle, a.threads);
    const fs::path out(a.out);
    fs::create_directories(out);
    const auto problem = emt::make_problem(r.cfg, r.cycle);

    emt::DpRun run;
    try {
        run = emt::run_dp(problem);
    } catch (const emt::RolloutError& e) {
        throw SolveFailure(e.what());
    }
    const double v0 = run.solution.values.value(0, problem.model().battery.soc_init);
    if (v0 >= problem.config().infeasible_penalty) {
        throw SolveFailure("no feasible trajectory from the initial SOC (V0 = " + emt::io::format_number(v0) + ")");
    }
    run.summary.cycle_source = r.cycle_source;

    write_common(out, r, run.trajectory);
    if (a.policy_format == "binary") {
        emt::io::write_file((out / "policy.bin").string(), emt::io::write_policy_binary(run.solution));
    } else {
        emt::io::write_file((out / "policy.csv").string(), emt::io::write_policy_csv(problem, run.solution));
    }
    emt::io::write_file((out / "value_table.json").string(),
                        emt::io::value_table_summary(problem, run.solution).dump(2) + "\n");
    emt::io::write_file((out / "histogram.csv").string(), emt::io::write_histogram(run.summary.histogram));
    const json extra{{"effective_config", r.builder.effective()},
                     {"solver",
                      {{"solve_seconds", run.solve_seconds},
                       {"v0_at_soc_init", v0},
                       {"rollout_total", run.path.total()}}}};
    emt::io::write_file((out / "summary.json").string(), emt::io::write_summary(run.summary, extra));

    std::printf("dp: %zu stages, fuel %.4f L, final SOC %.4f, composite %.4f (solve %.2f s)\n", run.summary.stages,
                run.summary.total_fuel_l, run.summary.final_soc, run.summary.total_composite, run.solve_seconds);
    return kOk;
}

int run_baseline_cmd(const RunArgs& a) {
    const auto r = load_run(a.cycle, a.threads);
    const fs::path out(a.out);
    fs::create_directories(out);
    const auto problem = emt::make_problem(r.cfg, r.cycle);
    emt::BaselineRun run;
    try {
        run = emt::run_baseline(problem, r.cfg.rule);
    } catch (const emt::RolloutError& e) {
        throw SolveFailure(e.what());
    }
    run.summary.cycle_source = r.cycle_source;
    write_common(out, r, run.rule.trajectory);
    emt::io::write_file((out / "histogram.csv").string(), emt::io::write_histogram(run.summary.histogram));
    const json extra{{"effective_config", r.builder.effective()},
                     {"rule",
                      {{"saturated_stages", run.rule.saturated_stages},
                       {"fallback_stages", run.rule.fallback_stages},
                       {"max_snap_ps_kw", run.rule.max_snap_dps},
                       {"mean_snap_ps_kw", run.rule.mean_snap_dps},
                       {"max_snap_ne_rpm", run.rule.max_snap_dne}}}};
    emt::io::write_file((out / "summary.json").string(), emt::io::write_summary(run.summary, extra));
    std::printf("rule: %zu stages, fuel %.4f L, final SOC %.4f, composite %.4f, %zu saturated\n", run.summary.stages,
                run.summary.total_fuel_l, run.summary.final_soc, run.summary.total_composite,
                run.rule.saturated_stages);
    return kOk;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string reference;
    std::string candidate;
    std::string out;
    double soc0 = emt::ObjectiveParams{}.soc0;
    double density = emt::VehicleParams{}.fuel_density;
};

int run_compare(const CompareArgs& a) {
    const auto ref = emt::io::parse_trajectory(emt::io::read_file(a.reference));
    const auto cand = emt::io::parse_trajectory(emt::io::read_file(a.candidate));
    const auto cmp = emt::compare_trajectories(ref, cand, a.soc0, a.density);
    json j = emt::to_json(cmp, a.density);
    j["reference"]["path"] = a.reference;
    j["candidate"]["path"] = a.candidate;
    const fs::path out(a.out);
    fs::create_directories(out);
    emt::io::write_file((out / "compare.json").string(), j.dump(2) + "\n");
    emt::io::write_file((out / "hist_reference.csv").string(), emt::io::write_histogram(cmp.reference.histogram));
    emt::io::write_file((out / "hist_candidate.csv").string(), emt::io::write_histogram(cmp.candidate.histogram));
    std::cout << j.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

int run_report(const std::string& dir) {
    const fs::path d(dir);
    const bool has_run = fs::exists(d / "summary.json") && fs::exists(d / "trajectory.csv");
    const bool has_cmp = fs::exists(d / "compare.json");
    if (!has_run && !has_cmp) {
        throw emt::ParseError("'" + dir + "' has neither summary.json + trajectory.csv nor compare.json", 0);
    }
    std::optional<json> cmp;
    if (has_cmp) cmp = emt::io::parse_json(emt::io::read_file((d / "compare.json").string()), "compare.json");

    std::string md;
    std::size_t flagged = 0;
    if (has_run) {
        const auto raw = emt::io::parse_json(emt::io::read_file((d / "summary.json").string()), "summary.json");
        emt::ReportInput in;
        in.summary = emt::io::summary_from_json(raw);
        in.trajectory = emt::io::parse_trajectory(emt::io::read_file((d / "trajectory.csv").string()));
        in.trajectory.terminal_cost = 0.0;
        if (raw.contains("effective_config")) {
            const auto& b = raw["effective_config"]["battery"];
            in.soc_min = b.value("soc_min", in.soc_min);
            in.soc_max = b.value("soc_max", in.soc_max);
        }
        const auto violations = emt::report_violations(in);
        flagged = violations.size();
        md = emt::render_report(in, violations, cmp ? &*cmp : nullptr);
    } else {
        md = "# Comparison report\n\n" + emt::render_comparison(*cmp);
    }
    emt::io::write_file((d / "report.md").string(), md);
    std::cout << md;
    if (flagged) std::cerr << flagged << " violation(s) flagged\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective DP energy management for a series-parallel hybrid powertrain"};
    app.require_subcommand(1);

    WeightsArgs wa;
    auto* weights = app.add_subcommand("weights", "AHP priority vectors and consistency");
    weights->add_option("--matrix", wa.matrix, "CSV judgment matrix (entries may be a/b fractions)");
    weights->add_option("--pattern", wa.pattern, "low | medium | high");
    weights->add_flag("--recompute", wa.recompute, "recompute from the bundled matrix instead of the constants");

    CycleArgs ca;
    auto* classify = app.add_subcommand("classify", "driving-pattern labels and segments of a cycle");
    classify->add_option("--cycle", ca.cycle, "cycle CSV (default: bundled synthetic cycle)");
    classify->add_option("--config", ca.config, "JSON configuration");
    classify->add_option("--set", ca.sets, "override, e.g. cycle.min_segment_length=10");

    RunArgs ra;
    const auto add_run_flags = [&ra](CLI::App* sub) {
        sub->add_option("--cycle", ra.cycle.cycle, "cycle CSV (default: bundled synthetic cycle)");
        sub->add_option("--config", ra.cycle.config, "JSON configuration");
        sub->add_option("--out", ra.out, "output directory")->required();
        sub->add_option("--set", ra.cycle.sets, "override any config key, e.g. dp.soc_nodes=51");
        sub->add_option("--threads", ra.threads, "worker threads for the backward pass")->check(CLI::PositiveNumber);
        sub->add_option("--policy-format", ra.policy_format, "csv | binary")
            ->check(CLI::IsMember({"csv", "binary"}));
    };
    auto* solve = app.add_subcommand("solve", "DP solve, rollout and artifacts");
    add_run_flags(solve);
    auto* baseline = app.add_subcommand("baseline", "rule-based strategy on the same grids");
    add_run_flags(baseline);

    CompareArgs cma;
    auto* compare = app.add_subcommand("compare", "compare two trajectory CSVs (reference first)");
    compare->add_option("reference", cma.reference, "reference trajectory CSV")->required();
    compare->add_option("candidate", cma.candidate, "candidate trajectory CSV")->required();
    compare->add_option("--out", cma.out, "output directory")->required();
    compare->add_option("--soc0", cma.soc0, "SOC reference for drift");
    compare->add_option("--fuel-density", cma.density, "g/L");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "render a run directory as markdown");
    report->add_option("dir", report_dir, "directory from solve, baseline or compare")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*weights) return run_weights(wa);
        if (*classify) return run_classify(ca);
        if (*solve) return run_solve(ra);
        if (*baseline) return run_baseline_cmd(ra);
        if (*compare) return run_compare(cma);
        if (*report) return run_report(report_dir);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const SolveFailure& e) {
        std::cerr << "solve failed: " << e.what() << "\n";
        return kSolve;
    } catch (const emt::RolloutError& e) {
        std::cerr << "solve failed: " << e.what() << "\n";
        return kSolve;
    } catch (const emt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
