#pragma once

// Subcommands. Each returns the tables for one figure, ready for rendering.

#include <charconv>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "../dqd.hpp"
#include "../metrics.hpp"
#include "../readout.hpp"
#include "../resonator.hpp"
#include "../steady_state.hpp"
#include "../units.hpp"
#include "config.hpp"
#include "table.hpp"

namespace qdotsim::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr double kMaxPeakGridStep = 50e3;  // [Hz]

struct RunContext {
    ExperimentConfig cfg;
    int threads = 1;
    std::optional<double> tn_kelvin;  // overrides the chain's T_N
    std::string timestamp;            // provenance only; excluded from determinism
};

/// Process-wide calibration results keyed by config hash.
class CalibrationCache {
public:
    static CalibrationCache& instance() {
        static CalibrationCache cache;
        return cache;
    }

    ResonatorParams get(const ExperimentConfig& cfg) {
        const std::string key = config_hash(cfg);
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        ResonatorParams r = calibrated(cfg.resonator(), cfg.dqd().c_geo);
        cache_.emplace(key, r);
        ++misses_;
        return r;
    }

    int misses() const { return misses_; }

private:
    std::mutex mutex_;
    std::map<std::string, ResonatorParams> cache_;
    int misses_ = 0;
};

/// Parses "a:b:step" in dBm.
inline StepGrid parse_power_range(std::string_view text) {
    StepGrid g;
    double* slots[3] = {&g.start, &g.stop, &g.step};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        const std::size_t end = i < 2 ? text.find(':', pos) : text.size();
        if (end == std::string_view::npos)
            throw ValidationError("expected start:stop:step", "--power-dbm");
        const std::string part(text.substr(pos, end - pos));
        try {
            std::size_t used = 0;
            *slots[i] = std::stod(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ValidationError("not a number: '" + part + "'", "--power-dbm");
        }
        pos = end + 1;
    }
    if (!(g.step > 0.0)) throw ValidationError("step must be > 0", "--power-dbm");
    if (!(g.stop >= g.start)) throw ValidationError("grid is empty (stop < start)", "--power-dbm");
    return g;
}

namespace detail {

inline double phase_deg(complex z) { return std::arg(z) * 180.0 / std::numbers::pi; }

inline void stamp(ResultTable& t, const RunContext& ctx, const std::string& command,
                  const ResonatorParams& res) {
    const ExperimentConfig& c = ctx.cfg;
    const DqdParams d = c.dqd();
    const ResonatorParams r0 = c.resonator();
    auto& p = t.provenance;
    p.emplace_back("command", command);
    p.emplace_back("tool_version", kToolVersion);
    p.emplace_back("config_hash", config_hash(c));
    p.emplace_back("timestamp", ctx.timestamp);
    // Echo of the device parameters, converted back from SI.
    p.emplace_back("dqd.two_tc_over_h_ghz",
                   format_echo(units::gap_hz_from_tunnel_coupling(d.tunnel_coupling) / 1e9));
    p.emplace_back("dqd.lever_arm_mev_per_v", format_echo(units::lever_arm_to_mev_per_v(d.lever_arm)));
    p.emplace_back("dqd.c_geo_ff", format_echo(d.c_geo / 1e-15));
    p.emplace_back("resonator.z_tl_ohm", format_echo(r0.z_tl));
    p.emplace_back("resonator.z0_ohm", format_echo(r0.z0));
    p.emplace_back("resonator.c_c_ff", format_echo(r0.c_c / 1e-15));
    p.emplace_back("resonator.r_tl_ohm", format_echo(r0.r_tl));
    p.emplace_back("resonator.f_bare_ghz", format_echo(r0.bare_resonance_target / 1e9));
    p.emplace_back("calibration.f_halfwave_ghz", format_number(res.f_halfwave / 1e9));
    p.emplace_back("solver.capacitance_model", to_string(c.solver.model));
}

inline double chain_t_n(const RunContext& ctx) {
    if (ctx.tn_kelvin) {
        if (!(*ctx.tn_kelvin > 0.0)) throw ValidationError("must be > 0", "--tn-kelvin");
        return *ctx.tn_kelvin;
    }
    return noise_temperature(ctx.cfg.noise_chain());
}

}  // namespace detail

/// |S21| and phase vs frequency for both states at every power.
inline std::vector<ResultTable> cmd_s21_map(const RunContext& ctx) {
    const auto& c = ctx.cfg;
    const DqdParams d = c.dqd();
    const ResonatorParams res = CalibrationCache::instance().get(c);
    const auto freqs_ghz = c.frequency_ghz.values();
    std::vector<double> freqs;
    for (double g : freqs_ghz) freqs.push_back(units::ghz(g));
    const auto dbm = c.power_dbm.values();
    const auto map = resonance_map(d, res, freqs, dbm_to_watt(dbm), c.solver, ctx.threads);

    ResultTable t("s21_map", {{"power", "dBm"},
                              {"frequency", "GHz"},
                              {"s21_mag_triplet", "1"},
                              {"s21_phase_triplet", "deg"},
                              {"s21_mag_singlet", "1"},
                              {"s21_phase_singlet", "deg"},
                              {"c_q_eff", "aF"},
                              {"iterations", "1"},
                              {"converged", "bool"}});
    detail::stamp(t, ctx, "s21-map", res);
    for (std::size_t j = 0; j < dbm.size(); ++j)
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            const OperatingPoint& op = map.singlet[i][j];
            t.add_row({dbm[j], freqs_ghz[i], std::abs(map.s21_triplet[i]),
                       detail::phase_deg(map.s21_triplet[i]), std::abs(op.s.s21),
                       detail::phase_deg(op.s.s21), op.c_q_eff / 1e-18,
                       static_cast<double>(op.iterations), op.converged ? 1.0 : 0.0});
        }
    return {t};
}

/// Resonance shift between |T> and |S> vs probe power.
inline std::vector<ResultTable> cmd_freq_shift(const RunContext& ctx) {
    const auto& c = ctx.cfg;
    const double step = units::ghz(c.frequency_ghz.stop - c.frequency_ghz.start) /
                        std::max(c.frequency_ghz.points - 1, 1);
    if (step > kMaxPeakGridStep)
        throw ValidationError("frequency grid step " + format_number(step / 1e3) +
                                  " kHz exceeds 50 kHz",
                              "sweep.frequency_ghz.points");
    const DqdParams d = c.dqd();
    const ResonatorParams res = CalibrationCache::instance().get(c);
    std::vector<double> freqs;
    for (double g : c.frequency_ghz.values()) freqs.push_back(units::ghz(g));
    const auto dbm = c.power_dbm.values();
    const auto shifts = frequency_shift(resonance_map(d, res, freqs, dbm_to_watt(dbm), c.solver, ctx.threads));

    ResultTable t("freq_shift", {{"power", "dBm"},
                                 {"f_triplet", "GHz"},
                                 {"f_singlet", "GHz"},
                                 {"shift", "MHz"},
                                 {"peak_at_grid_edge", "bool"},
                                 {"converged", "bool"}});
    detail::stamp(t, ctx, "freq-shift", res);
    for (std::size_t j = 0; j < shifts.size(); ++j) {
        const ShiftPoint& s = shifts[j];
        // A peak pinned to the grid edge is not a resolved shift.
        t.add_row({dbm[j], s.f_triplet / 1e9, s.f_singlet / 1e9, s.shift / 1e6, s.at_edge ? 1.0 : 0.0,
                   s.converged && !s.at_edge ? 1.0 : 0.0});
    }
    return {t};
}

namespace detail {

inline ResultTable signal_table(const std::string& name, const RunContext& ctx,
                                const ResonatorParams& res, double f,
                                const std::vector<double>& dbm, const std::vector<SignalPoint>& pts) {
    ResultTable t(name, {{"power", "dBm"},
                         {"probe_frequency", "GHz"},
                         {"separation", "1"},
                         {"p_sig", "dBm"},
                         {"s21_mag_triplet", "1"},
                         {"s21_mag_singlet", "1"},
                         {"s21_phase_triplet", "deg"},
                         {"s21_phase_singlet", "deg"},
                         {"c_q_eff", "aF"},
                         {"converged", "bool"}});
    stamp(t, ctx, "signal", res);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const SignalPoint& s = pts[j];
        t.add_row({dbm[j], f / 1e9, s.separation, units::watt_to_dbm(s.p_sig),
                   std::abs(s.s21_triplet), std::abs(s.s21_singlet), phase_deg(s.s21_triplet),
                   phase_deg(s.s21_singlet), s.c_q_eff / 1e-18, s.converged ? 1.0 : 0.0});
    }
    return t;
}

}  // namespace detail

/// Separation factor and received power for case-1 and case-2 probing.
inline std::vector<ResultTable> cmd_signal(const RunContext& ctx) {
    const auto& c = ctx.cfg;
    const DqdParams d = c.dqd();
    const ResonatorParams res = CalibrationCache::instance().get(c);
    const ProbePlan plan = probe_plan(d, res);
    const auto dbm = c.power_dbm.values();
    const auto pw = dbm_to_watt(dbm);
    const double probes[2] = {plan.f_case1(), plan.f_case2()};
    std::vector<SignalPoint> results[2];
    parallel_for(2, ctx.threads,
                 [&](std::size_t k) { results[k] = signal_sweep(d, res, probes[k], pw, c.solver); });
    return {detail::signal_table("signal_case1", ctx, res, probes[0], dbm, results[0]),
            detail::signal_table("signal_case2", ctx, res, probes[1], dbm, results[1])};
}

/// SNR_N vs power (case-1) at the configured T_N, per integration time.
inline std::vector<ResultTable> cmd_snr(const RunContext& ctx) {
    const auto& c = ctx.cfg;
    const DqdParams d = c.dqd();
    const ResonatorParams res = CalibrationCache::instance().get(c);
    const ProbePlan plan = probe_plan(d, res);
    const auto dbm = c.power_dbm.values();
    const auto pts = signal_sweep(d, res, plan.f_case1(), dbm_to_watt(dbm), c.solver);

    std::vector<double> tns{detail::chain_t_n(ctx)};
    if (c.overlay_measured) tns.push_back(c.measured_t_n_k);

    std::vector<ResultTable> out;
    ResultTable summary("snr_summary", {{"t_n", "K"},
                                        {"max_snr_n", "dBHz"},
                                        {"power_at_max", "dBm"},
                                        {"max_snr_at_1us", "dB"},
                                        {"converged", "bool"}});
    detail::stamp(summary, ctx, "snr", res);
    for (std::size_t k = 0; k < tns.size(); ++k) {
        ResultTable t(k == 0 ? "snr" : "snr_measured_tn", {{"power", "dBm"},
                                                          {"t_int", "us"},
                                                          {"t_n", "K"},
                                                          {"p_sig", "dBm"},
                                                          {"snr_n", "dBHz"},
                                                          {"snr", "dB"},
                                                          {"ber", "1"},
                                                          {"fidelity", "1"},
                                                          {"converged", "bool"}});
        detail::stamp(t, ctx, "snr", res);
        double best = -INFINITY, best_p = 0.0;
        bool all_ok = true;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            for (double ti : c.t_int_us) {
                const ReadoutFigures f = snr(pts[j].p_sig, tns[k], ti * 1e-6);
                t.add_row({dbm[j], ti, tns[k], units::watt_to_dbm(pts[j].p_sig), f.snr_n_dbhz,
                           f.snr_db, f.ber, f.fidelity, pts[j].converged ? 1.0 : 0.0});
            }
            const double sn = snr(pts[j].p_sig, tns[k], 1e-6).snr_n_dbhz;
            if (sn > best) {
                best = sn;
                best_p = dbm[j];
            }
            all_ok = all_ok && pts[j].converged;
        }
        summary.add_row({tns[k], best, best_p, best - 60.0, all_ok ? 1.0 : 0.0});
        out.push_back(std::move(t));
    }
    out.push_back(std::move(summary));
    return out;
}

/// SNR over (T_sys, T_int) at a fixed probe power with T_N = T_amb + T_sys.
inline std::vector<ResultTable> cmd_contour(const RunContext& ctx) {
    const auto& c = ctx.cfg;
    const DqdParams d = c.dqd();
    const ResonatorParams res = CalibrationCache::instance().get(c);
    double p_sig;
    bool ok = true;
    std::string basis;
    if (c.has_snr_n_basis) {
        // SNR_N known at one noise temperature fixes P_sig = SNR_N·k·T_N.
        p_sig = units::db_to_ratio(c.snr_n_basis_dbhz) * constants::boltzmann * c.snr_n_basis_t_n_k;
        basis = "snr_n " + format_number(c.snr_n_basis_dbhz) + " dBHz at " +
                format_number(c.snr_n_basis_t_n_k) + " K";
    } else {
        // Continuation from the bottom of the power grid up to the contour power.
        std::vector<double> dbm;
        for (double p : c.power_dbm.values())
            if (p < c.contour_power_dbm) dbm.push_back(p);
        dbm.push_back(c.contour_power_dbm);
        const auto pts = signal_sweep(d, res, probe_plan(d, res).f_case1(), dbm_to_watt(dbm), c.solver);
        p_sig = pts.back().p_sig;
        ok = pts.back().converged;
        basis = "simulated case-1 at " + format_number(c.contour_power_dbm) + " dBm";
    }
    ResultTable t("contour", {{"t_sys", "K"},
                              {"t_int", "us"},
                              {"t_n", "K"},
                              {"snr", "dB"},
                              {"ber", "1"},
                              {"converged", "bool"}});
    detail::stamp(t, ctx, "contour", res);
    t.provenance.emplace_back("contour.basis", basis);
    t.provenance.emplace_back("contour.t_amb_k", format_number(c.contour_t_amb_k));
    for (double ts : c.t_sys_k.values())
        for (double ti : c.contour_t_int_us.values()) {
            const double tn = c.contour_t_amb_k + ts;
            const ReadoutFigures f = snr(p_sig, tn, ti * 1e-6);
            t.add_row({ts, ti, tn, f.snr_db, f.ber, ok ? 1.0 : 0.0});
        }
    return {t};
}

/// C_q,eff and S21 vs DC gate offset at the case-1 probe frequency.
inline std::vector<ResultTable> cmd_linecut(const RunContext& ctx) {
    const auto& c = ctx.cfg;
    const DqdParams d = c.dqd();
    const ResonatorParams res = CalibrationCache::instance().get(c);
    const double f = probe_plan(d, res).f_case1();
    const double p = units::dbm_to_watt(c.linecut_power_dbm);
    ResultTable t("linecut", {{"gate_offset", "mV"},
                              {"detuning", "ueV"},
                              {"c_q_eff", "aF"},
                              {"s21_mag", "1"},
                              {"s21_phase", "deg"},
                              {"v_node", "uV"},
                              {"converged", "bool"}});
    detail::stamp(t, ctx, "linecut", res);
    t.provenance.emplace_back("linecut.probe_frequency_ghz", format_number(f / 1e9));
    t.provenance.emplace_back("linecut.power_dbm", format_number(c.linecut_power_dbm));
    std::optional<double> warm;
    for (double mv : c.linecut_gate_mv.values()) {
        const double eps0 = d.lever_arm * mv * 1e-3;
        const OperatingPoint op = solve_operating_point(d, res, kSingletReadout, f, p, c.solver, warm, eps0);
        if (c.solver.continuation && op.converged) warm = op.c_q_eff;
        t.add_row({mv, eps0 / constants::elementary_charge * 1e6, op.c_q_eff / 1e-18,
                   std::abs(op.s.s21), detail::phase_deg(op.s.s21), std::abs(op.v_node) * 1e6,
                   op.converged ? 1.0 : 0.0});
    }
    return {t};
}

/// Noise-chain breakdown, noise-temperature requirement and FDMA channel estimate.
inline std::vector<ResultTable> cmd_budget(const RunContext& ctx) {
    const auto& c = ctx.cfg;
    const DqdParams d = c.dqd();
    const ResonatorParams res = CalibrationCache::instance().get(c);
    const NoiseChain chain = c.noise_chain();

    ResultTable stages("noise_budget", {{"stage", "1"},
                                        {"gain", "dB"},
                                        {"noise_temperature", "K"},
                                        {"input_referred", "K"},
                                        {"cumulative_t_n", "K"},
                                        {"converged", "bool"}});
    detail::stamp(stages, ctx, "budget", res);
    const auto contrib = noise_contributions(chain);
    double total = chain.t_amb;
    stages.add_row({0.0, 0.0, chain.t_amb, chain.t_amb, total, 1.0});
    stages.provenance.emplace_back("stage.0", "ambient");
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        total += contrib[i];
        stages.provenance.emplace_back("stage." + std::to_string(i + 1), chain.stages[i].name);
        stages.add_row({static_cast<double>(i + 1), units::ratio_to_db(chain.stages[i].gain),
                        chain.stages[i].noise_temperature, contrib[i], total, 1.0});
    }

    // SNR_N basis: the configured one, else the simulated case-1 maximum at the chain T_N.
    const double t_n = detail::chain_t_n(ctx);
    double basis = c.snr_n_basis_dbhz, basis_tn = c.snr_n_basis_t_n_k;
    bool ok = true;
    if (!c.has_snr_n_basis) {
        const auto pts = signal_sweep(d, res, probe_plan(d, res).f_case1(), c.powers_w(), c.solver);
        basis = -INFINITY;
        basis_tn = t_n;
        for (const auto& p : pts) {
            basis = std::max(basis, snr(p.p_sig, t_n, 1e-6).snr_n_dbhz);
            ok = ok && p.converged;
        }
    }
    ResultTable req("noise_requirement", {{"snr_n_basis", "dBHz"},
                                          {"reference_t_n", "K"},
                                          {"target_snr", "dB"},
                                          {"t_int", "us"},
                                          {"excess", "dB"},
                                          {"max_t_n", "K"},
                                          {"max_t_sys", "K"},
                                          {"converged", "bool"}});
    detail::stamp(req, ctx, "budget", res);
    for (double ti : c.t_int_us) {
        const NoiseRequirement r =
            required_noise_temperature(basis, basis_tn, c.target_snr_db, ti * 1e-6, c.t_amb_electronics_k);
        req.add_row({basis, basis_tn, c.target_snr_db, ti, r.excess_db, r.max_t_n, r.max_t_sys,
                     ok ? 1.0 : 0.0});
    }

    const ProbePlan plan = probe_plan(d, res);
    const double shift = plan.f_triplet - plan.f_singlet;
    const double bw = transmission_bandwidth(res, d.c_geo, d.c_geo, plan.f_triplet);
    ResultTable fdma("fdma", {{"freq_shift", "MHz"},
                              {"resonator_bandwidth", "MHz"},
                              {"channel_bandwidth", "MHz"},
                              {"converged", "bool"}});
    detail::stamp(fdma, ctx, "budget", res);
    fdma.add_row({shift / 1e6, bw / 1e6, fdma_channel_estimate(shift, bw) / 1e6, 1.0});
    return {stages, req, fdma};
}

using Command = std::function<std::vector<ResultTable>(const RunContext&)>;

inline const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> table{
        {"s21-map", cmd_s21_map},   {"freq-shift", cmd_freq_shift}, {"signal", cmd_signal},
        {"snr", cmd_snr},           {"contour", cmd_contour},       {"linecut", cmd_linecut},
        {"budget", cmd_budget},
    };
    return table;
}

/// Fraction of flagged rows over all tables that carry a converged column.
inline double failure_fraction(const std::vector<ResultTable>& tables) {
    std::size_t failed = 0, total = 0;
    for (const auto& t : tables) {
        bool has = false;
        for (const auto& col : t.columns) has = has || col.name == "converged";
        if (!has) continue;
        failed += t.failed_rows();
        total += t.rows.size();
    }
    return total ? static_cast<double>(failed) / static_cast<double>(total) : 0.0;
}

}  // namespace qdotsim::cli
