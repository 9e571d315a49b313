#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "emt/dp.hpp"
#include "emt/drive_cycle.hpp"
#include "emt/errors.hpp"
#include "emt/interp.hpp"
#include "emt/objectives.hpp"
#include "emt/patterns.hpp"
#include "emt/powertrain.hpp"

namespace emt {

struct DpConfig {
    std::size_t soc_nodes = 101;
    std::size_t ne_count = 10;
    std::size_t ta_count = 7;
    std::size_t tb_count = 7;
    double ne_min = 600.0;     // rpm
    double ne_max = 4200.0;    // rpm
    double ta_max = 900.0;     // N·m, grid spans [-ta_max, ta_max]
    double tb_max = 900.0;
    double balance_tol = 1e-6;            // kW
    double infeasible_penalty = 1e6;
    double terminal_soc_penalty = 0.0;    // times (soc_N - soc0)^2
    std::string interpolation = "linear";
    unsigned threads = 1;

    void validate() const {
        if (soc_nodes < 2 || ne_count < 2 || ta_count < 2 || tb_count < 2) {
            throw ConfigError("dp grid counts must all be at least 2");
        }
        if (!(ne_min > 0.0 && ne_min < ne_max)) throw ConfigError("dp engine speed range must satisfy 0 < ne_min < ne_max");
        if (!(ta_max > 0.0 && tb_max > 0.0)) throw ConfigError("dp machine torque limits must be positive");
        if (!(balance_tol > 0.0)) throw ConfigError("dp.balance_tol must be positive");
        if (!(infeasible_penalty > 0.0)) throw ConfigError("dp.infeasible_penalty must be positive");
        if (terminal_soc_penalty < 0.0) throw ConfigError("dp.terminal_soc_penalty must be non-negative");
        if (interpolation != "linear") throw ConfigError("dp.interpolation supports only 'linear'");
        if (threads == 0) throw ConfigError("dp.threads must be at least 1");
    }
};

/// Cartesian (engine speed x torque A x torque B) decision grid.
struct ActionGrid {
    std::vector<double> ne;
    std::vector<double> ta;
    std::vector<double> tb;

    static ActionGrid from_config(const DpConfig& cfg) {
        return {linspace(cfg.ne_min, cfg.ne_max, cfg.ne_count), linspace(-cfg.ta_max, cfg.ta_max, cfg.ta_count),
                linspace(-cfg.tb_max, cfg.tb_max, cfg.tb_count)};
    }

    std::size_t size() const { return ne.size() * ta.size() * tb.size(); }

    std::size_t index(std::size_t ine, std::size_t ita, std::size_t itb) const {
        return (ine * ta.size() + ita) * tb.size() + itb;
    }

    struct Decoded {
        std::size_t ine, ita, itb;
    };

    Decoded decode(std::size_t index) const {
        const std::size_t itb = index % tb.size();
        const std::size_t rest = index / tb.size();
        return {rest / ta.size(), rest % ta.size(), itb};
    }
};

/// Everything a stage needs that does not depend on the decision.
struct StageDemand {
    double t = 0.0;
    double dt = 1.0;
    double v_kmh = 0.0;
    double f = 0.0;
    double pc = 0.0;
    double pd = 0.0;
    double n_out = 0.0;
    DrivingPattern pattern = DrivingPattern::LowSpeed;
    PatternWeights weights;
};

inline StageDemand make_stage_demand(const DriveCycle& cycle, std::size_t k, const VehicleParams& vehicle,
                                     const std::array<PatternWeights, 3>& weights) {
    const auto& pt = cycle[k];
    StageDemand d;
    d.t = pt.t;
    d.dt = cycle.dt(k);
    d.v_kmh = pt.v;
    d.f = pt.f;
    d.pc = pt.pc;
    d.pd = demanded_drive_power(vehicle, pt.v / 3.6, pt.f, cycle.accel(k));
    d.n_out = vehicle.output_speed_rpm(pt.v);
    d.pattern = classify_speed(pt.v);
    d.weights = weights[index_of(d.pattern)];
    return d;
}

/// A decision (ne, ta, tb) with its closed power flow and derived quantities.
struct ActionCandidate {
    std::size_t index = 0;
    double ne = 0.0;
    double ta = 0.0;
    double tb = 0.0;
    double te = 0.0;
    double na = 0.0;
    double nb = 0.0;
    double eta_a = 1.0;
    double eta_b = 1.0;
    PowerFlow flow;
    double fuel = 0.0;      // g/s
    double dsoc = 0.0;      // over the stage
    double pe_max = 0.0;    // kW at ne
    double pa_max = 0.0;    // kW at |ta|
    double pb_max = 0.0;
    double brake = 0.0;     // kW dissipated by friction brakes, part of flow.ploss
    // State-dependent part, filled by apply_state.
    double soc = std::numeric_limits<double>::quiet_NaN();
    double ps_max = 0.0;    // battery discharge limit at soc
};

/// Closes the power flow for one decision: machine shaft powers from torque and coupled
/// speed, battery power as the electric-bus slack, engine power from the driving balance
/// (friction brakes absorb any surplus), engine torque and fuel from the map. Returns
/// nullopt when any component envelope or the balance tolerance is violated.
inline std::optional<ActionCandidate> close_power_flow(const PowertrainModel& model, const StageDemand& stage,
                                                       double ne, double ta, double tb, double balance_tol) {
    const auto& veh = model.vehicle;
    ActionCandidate c;
    c.ne = ne;
    c.ta = ta;
    c.tb = tb;
    c.na = veh.machine_a_speed(ne, stage.n_out);
    c.nb = veh.machine_b_speed(ne, stage.n_out);

    const auto machine_ok = [](const MachineMap& m, double n, double t) {
        return within(m.speed_grid(), std::abs(n)) && within(m.torque_grid(), std::abs(t)) &&
               within(m.max_power.xs, std::abs(t));
    };
    if (!machine_ok(model.machine_a, c.na, ta) || !machine_ok(model.machine_b, c.nb, tb)) return std::nullopt;
    if (!within(model.engine.speed_grid(), ne)) return std::nullopt;

    c.eta_a = machine_efficiency(model.machine_a, c.na, ta);
    c.eta_b = machine_efficiency(model.machine_b, c.nb, tb);
    c.pa_max = machine_max_power(model.machine_a, ta);
    c.pb_max = machine_max_power(model.machine_b, tb);

    PowerFlow& fl = c.flow;
    fl.pc = stage.pc;
    fl.pd = stage.pd;
    fl.pa = shaft_power_kw(c.na, ta);
    fl.pb = shaft_power_kw(c.nb, tb);
    if (std::abs(fl.pa) > c.pa_max + balance_tol || std::abs(fl.pb) > c.pb_max + balance_tol) return std::nullopt;

    // ps + k|ps| = -R with R the bus load excluding the battery's own loss share.
    const double k = veh.elec_loss_frac;
    const double rest = fl.pc + k * (std::abs(fl.pa) + std::abs(fl.pb)) + bus_power(fl.pa, c.eta_a) +
                        bus_power(fl.pb, c.eta_b);
    fl.ps = -rest >= 0.0 ? -rest / (1.0 + k) : -rest / (1.0 - k);
    fl.pl = k * (std::abs(fl.pa) + std::abs(fl.pb) + std::abs(fl.ps));
    if (std::abs(fl.ps) > model.battery.p_abs_max + balance_tol) return std::nullopt;

    const double eta_e = veh.mech_path_eff;
    fl.ploss = veh.proc_loss_frac * std::abs(fl.pd);
    const double pe = (fl.pd + fl.pc + fl.ploss + fl.ps) / eta_e;
    if (pe < 0.0) {
        c.brake = -pe * eta_e;
        fl.ploss += c.brake;
        fl.pe = 0.0;
    } else {
        fl.pe = pe;
    }

    c.te = fl.pe * 1000.0 / (ne * kRpmToRadPerSec);
    const double te_limit = engine_max_torque(model.engine, ne);
    if (c.te > te_limit || c.te > model.engine.torque_grid().back()) return std::nullopt;
    c.fuel = lookup_fuel_rate(model.engine, ne, c.te);
    c.pe_max = shaft_power_kw(ne, te_limit);

    try {
        c.dsoc = battery_soc_step(model.battery, fl.ps, stage.dt);
    } catch (const InfeasiblePowerError&) {
        return std::nullopt;
    }

    const auto r = power_balance_residuals(fl, c.eta_a, c.eta_b, eta_e);
    if (std::abs(r.elec) > balance_tol || std::abs(r.drive) > balance_tol) return std::nullopt;
    return c;
}

/// Applies the SOC-dependent checks: discharge limit and successor SOC inside the band.
inline bool apply_state(ActionCandidate& c, double soc, const BatteryPack& batt, double balance_tol) {
    c.soc = soc;
    c.ps_max = battery_max_discharge(batt, soc);
    if (c.flow.ps < 0.0 && -c.flow.ps > c.ps_max + balance_tol) return false;
    const double next = soc + c.dsoc;
    return next >= batt.soc_min - dp::SocGrid::kEdgeTolerance && next <= batt.soc_max + dp::SocGrid::kEdgeTolerance;
}

struct StageEvaluation {
    ObjectiveValues objectives;
    double cost = 0.0;
};

/// Weighted normalized objectives of a state-applied candidate.
inline StageEvaluation stage_cost(const ActionCandidate& c, const PatternWeights& w, const ObjectiveParams& p) {
    StageEvaluation e;
    auto& v = e.objectives;
    v.j1_raw = j1_raw(c.fuel, c.dsoc, c.soc, p);
    v.j2_raw = j2_raw(c.pe_max, c.ps_max, c.flow.pd);
    v.j3_raw = j3_raw(c.pa_max, c.pb_max, c.ps_max, c.flow.pc);
    v.j1_bar = j1_norm(v.j1_raw, p);
    v.j2_bar = j2_norm(c.pe_max, c.ps_max, c.flow.pd);
    v.j3_bar = j3_norm(c.pa_max, c.pb_max, c.ps_max, c.flow.pc);
    e.cost = composite(w, v);
    return e;
}

/// The drive-cycle energy-management problem on an SOC grid. Decision-only quantities
/// are computed once per (stage, action); state-dependent checks run per query.
class EmtProblem {
public:
    EmtProblem(const DriveCycle& cycle, PowertrainModel model, std::array<PatternWeights, 3> weights,
               ObjectiveParams params, DpConfig cfg)
        : model_(std::move(model)), weights_(weights), params_(params), cfg_(std::move(cfg)),
          actions_(ActionGrid::from_config(cfg_)) {
        if (cycle.empty()) throw DomainError("drive cycle is empty");
        model_.validate();
        params_.validate();
        cfg_.validate();
        for (const auto& w : weights_) w.validate();
        grid_ = dp::SocGrid::uniform(model_.battery.soc_min, model_.battery.soc_max, cfg_.soc_nodes);

        stages_.reserve(cycle.size());
        compact_.resize(cycle.size());
        position_.resize(cycle.size());
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            stages_.push_back(make_stage_demand(cycle, k, model_.vehicle, weights_));
            position_[k].assign(actions_.size(), -1);
            for (std::size_t a = 0; a < actions_.size(); ++a) {
                if (auto c = decision_candidate(k, a)) {
                    position_[k][a] = static_cast<std::int32_t>(compact_[k].size());
                    compact_[k].push_back({a, c->flow.ps, c->dsoc, c->fuel, c->pe_max, c->pa_max, c->pb_max});
                }
            }
        }
    }

    // StageProblem interface -------------------------------------------------

    std::size_t stage_count() const { return stages_.size(); }
    const dp::SocGrid& grid() const { return grid_; }
    std::size_t action_count(std::size_t) const { return actions_.size(); }

    std::optional<dp::ActionOutcome> evaluate(std::size_t k, double soc, std::size_t a) const {
        const std::int32_t pos = position_[k][a];
        if (pos < 0) return std::nullopt;
        return outcome(k, soc, compact_[k][static_cast<std::size_t>(pos)], battery_max_discharge(model_.battery, soc));
    }

    template <class Fn>
    void for_each_feasible(std::size_t k, double soc, Fn&& fn) const {
        const double ps_max = battery_max_discharge(model_.battery, soc);
        for (const auto& c : compact_[k]) {
            if (auto o = outcome(k, soc, c, ps_max)) fn(*o);
        }
    }

    double terminal_cost(double soc) const {
        const double dev = soc - params_.soc0;
        return cfg_.terminal_soc_penalty * dev * dev;
    }

    // Inspection -------------------------------------------------------------

    const StageDemand& stage(std::size_t k) const { return stages_[k]; }
    const PowertrainModel& model() const { return model_; }
    const ObjectiveParams& params() const { return params_; }
    const DpConfig& config() const { return cfg_; }
    const ActionGrid& action_grid() const { return actions_; }
    const std::array<PatternWeights, 3>& weights() const { return weights_; }

    /// Number of decisions at stage k that pass every SOC-independent check.
    std::size_t decision_feasible_count(std::size_t k) const { return compact_[k].size(); }

    /// Decision-only candidate (no SOC applied), or nullopt.
    std::optional<ActionCandidate> decision_candidate(std::size_t k, std::size_t a) const {
        const auto d = actions_.decode(a);
        auto c = close_power_flow(model_, stages_[k], actions_.ne[d.ine], actions_.ta[d.ita], actions_.tb[d.itb],
                                  cfg_.balance_tol);
        if (c) c->index = a;
        return c;
    }

    /// Fully evaluated candidate at (k, soc), or nullopt when infeasible there.
    std::optional<ActionCandidate> candidate_at(std::size_t k, double soc, std::size_t a) const {
        if (position_[k][a] < 0) return std::nullopt;
        auto c = decision_candidate(k, a);
        if (!c || !apply_state(*c, soc, model_.battery, cfg_.balance_tol)) return std::nullopt;
        return c;
    }

    /// All candidates feasible at (k, soc), in action-index order.
    std::vector<ActionCandidate> enumerate_actions(std::size_t k, double soc) const {
        std::vector<ActionCandidate> out;
        for (const auto& cc : compact_[k]) {
            if (auto c = candidate_at(k, soc, cc.index)) out.push_back(*c);
        }
        return out;
    }

    StageEvaluation evaluate_candidate(std::size_t k, const ActionCandidate& c) const {
        return stage_cost(c, stages_[k].weights, params_);
    }

private:
    struct Compact {
        std::size_t index;
        double ps, dsoc, fuel, pe_max, pa_max, pb_max;
    };

    std::optional<dp::ActionOutcome> outcome(std::size_t k, double soc, const Compact& c, double ps_max) const {
        if (c.ps < 0.0 && -c.ps > ps_max + cfg_.balance_tol) return std::nullopt;
        const double next = soc + c.dsoc;
        if (next < model_.battery.soc_min - dp::SocGrid::kEdgeTolerance ||
            next > model_.battery.soc_max + dp::SocGrid::kEdgeTolerance) {
            return std::nullopt;
        }
        // Same arithmetic as stage_cost() so trajectories reproduce solver costs bit for bit.
        const StageDemand& st = stages_[k];
        ObjectiveValues v;
        v.j1_bar = j1_norm(j1_raw(c.fuel, c.dsoc, soc, params_), params_);
        v.j2_bar = j2_norm(c.pe_max, ps_max, st.pd);
        v.j3_bar = j3_norm(c.pa_max, c.pb_max, ps_max, st.pc);
        return dp::ActionOutcome{composite(st.weights, v), next, c.fuel, std::abs(c.ps), c.index};
    }

    PowertrainModel model_;
    std::array<PatternWeights, 3> weights_;
    ObjectiveParams params_;
    DpConfig cfg_;
    ActionGrid actions_;
    dp::SocGrid grid_;
    std::vector<StageDemand> stages_;
    std::vector<std::vector<Compact>> compact_;
    std::vector<std::vector<std::int32_t>> position_;
};

static_assert(dp::StageProblem<EmtProblem>);

}  // namespace emt
