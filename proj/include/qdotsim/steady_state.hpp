#pragma once

// Self-consistent operating point of the sample: the DQD2 node amplitude sets
// the quantum capacitance, which in turn detunes the resonator and sets the
// node amplitude. Solved as a scalar fixed point in C_q.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "dqd.hpp"
#include "errors.hpp"
#include "resonator.hpp"

namespace qdotsim {

/// How the drive-dependent C_q is reduced to a single linear capacitance.
enum class CapacitanceModel {
    /// First-harmonic charge response (what the time-domain circuit sees). Default.
    Fundamental,
    /// Drive-cycle time average of C_q(ε).
    TimeAverage,
};

inline constexpr const char* to_string(CapacitanceModel m) {
    return m == CapacitanceModel::Fundamental ? "fundamental" : "average";
}

struct SolverConfig {
    double relaxation = 0.5;
    double rel_tol = 1e-6;
    int max_iter = 200;
    bool continuation = true;
    bool bracket_fallback = true;
    CapacitanceModel model = CapacitanceModel::Fundamental;

    void validate() const {
        if (!(relaxation > 0.0 && relaxation <= 1.0))
            throw ValidationError("must be in (0, 1]", "solver.relaxation");
        if (!(rel_tol > 0.0)) throw ValidationError("must be > 0", "solver.rel_tol");
        if (max_iter < 1) throw ValidationError("must be >= 1", "solver.max_iter");
    }
};

struct OperatingPoint {
    double frequency = 0.0;
    double p_rf = 0.0;
    SpinState state = kTripletReadout;
    double detuning_offset = 0.0;
    complex v_node{};
    double c_q_eff = 0.0;
    SParams s{};
    int iterations = 0;
    bool converged = false;
};

/// C_q presented by the dot in `state` when its gate swings with amplitude v_amp.
inline double drive_capacitance(const DqdParams& dqd, SpinState state, double v_amp,
                                double detuning_offset, CapacitanceModel model) {
    if (is_triplet(state)) return 0.0;
    const DriveSpec drive{v_amp, 1.0, detuning_offset};
    // Elliptic closed forms at zero offset; quadrature below |m| = 1e-6 where E − K cancels.
    const double ratio = dqd.lever_arm * v_amp / (2.0 * dqd.tunnel_coupling);
    const bool closed = detuning_offset == 0.0 && ratio * ratio >= 1e-6;
    double c;
    if (model == CapacitanceModel::Fundamental)
        c = closed ? fundamental_quantum_capacitance_closed_form(dqd, v_amp)
                   : fundamental_quantum_capacitance(dqd, drive);
    else
        c = closed ? effective_quantum_capacitance_closed_form(dqd, v_amp)
                   : effective_quantum_capacitance(dqd, drive);
    return state == SpinState::SingletGround ? c : -c;
}

inline OperatingPoint solve_operating_point(const DqdParams& dqd, const ResonatorParams& res,
                                            SpinState state, double f, double p_rf,
                                            const SolverConfig& cfg = {},
                                            std::optional<double> warm_start = std::nullopt,
                                            double detuning_offset = 0.0) {
    cfg.validate();
    if (!(p_rf >= 0.0)) throw ValidationError("must be >= 0", "p_rf");
    if (!res.calibrated()) throw ValidationError("resonator is not calibrated", "resonator");

    OperatingPoint op;
    op.frequency = f;
    op.p_rf = p_rf;
    op.state = state;
    op.detuning_offset = detuning_offset;

    auto respond = [&](double cq) { return evaluate_sample(res, dqd.c_geo, dqd.c_geo + cq, f, p_rf); };

    if (is_triplet(state)) {
        const SampleResponse r = respond(0.0);
        op.v_node = r.v_node;
        op.s = r.s;
        op.iterations = 1;
        op.converged = true;
        return op;
    }

    const double scale = dqd.peak_quantum_capacitance();
    const double tol = cfg.rel_tol * scale;
    auto image = [&](double cq) {
        return drive_capacitance(dqd, state, std::abs(respond(cq).v_node), detuning_offset, cfg.model);
    };

    double x = warm_start.value_or(state == SpinState::SingletGround ? scale : -scale);
    double lambda = cfg.relaxation;
    double best_x = x, best_res = INFINITY;
    double prev_r = 0.0;
    int sign_flips = 0;
    int it = 0;
    bool done = false;
    for (; it < cfg.max_iter; ++it) {
        const double r = image(x) - x;
        if (std::abs(r) < best_res) {
            best_res = std::abs(r);
            best_x = x;
        }
        if (std::abs(r) <= tol) {
            done = true;
            break;
        }
        if (it > 0 && r * prev_r < 0.0) {
            if (++sign_flips >= 2) {
                lambda *= 0.5;
                sign_flips = 0;
            }
        } else {
            sign_flips = 0;
        }
        prev_r = r;
        x += lambda * r;
    }
    x = done ? x : best_x;

    if (!done && cfg.bracket_fallback) {
        // g(x) = image(x) − x changes sign between the origin and ±β²/4t_c.
        const double sgn = state == SpinState::SingletGround ? 1.0 : -1.0;
        const double start = std::clamp(sgn * x, 0.0, scale);
        double lo = 0.0, hi = scale;  // in units of sgn·C
        auto g = [&](double u) { return sgn * (image(sgn * u) - sgn * u); };
        if (g(start) > 0.0) lo = start;
        else hi = start;
        while (hi - lo > 1e-3 * tol && it < cfg.max_iter + 200) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > 0.0 ? lo : hi) = mid;
            ++it;
        }
        x = sgn * 0.5 * (lo + hi);
        done = std::abs(image(x) - x) <= tol;
    }

    const SampleResponse r = respond(x);
    op.c_q_eff = x;
    op.v_node = r.v_node;
    op.s = r.s;
    op.iterations = std::max(it, 1);
    op.converged = done;
    return op;
}

namespace detail {

inline std::vector<OperatingPoint> sweep_in_order(const DqdParams& dqd, const ResonatorParams& res,
                                                  SpinState state, double f,
                                                  std::span<const double> powers,
                                                  const SolverConfig& cfg, double detuning_offset,
                                                  std::optional<double> warm = std::nullopt) {
    std::vector<OperatingPoint> out;
    out.reserve(powers.size());
    for (double p : powers) {
        out.push_back(solve_operating_point(dqd, res, state, f, p, cfg, warm, detuning_offset));
        if (cfg.continuation && out.back().converged) warm = out.back().c_q_eff;
    }
    return out;
}

}  // namespace detail

/// Ascending power sweep with continuation: each point starts from the previous
/// converged C_q, which keeps the solver on the low-power branch.
inline std::vector<OperatingPoint> power_sweep(const DqdParams& dqd, const ResonatorParams& res,
                                               SpinState state, double f,
                                               std::span<const double> powers,
                                               const SolverConfig& cfg = {},
                                               double detuning_offset = 0.0) {
    if (powers.empty()) throw ValidationError("power list is empty", "powers");
    for (std::size_t i = 1; i < powers.size(); ++i)
        if (!(powers[i] > powers[i - 1]))
            throw ValidationError("powers must be strictly ascending", "powers");
    return detail::sweep_in_order(dqd, res, state, f, powers, cfg, detuning_offset);
}

struct HysteresisScan {
    std::vector<OperatingPoint> up;
    std::vector<OperatingPoint> down;  // same power order as `up`
    bool bistable = false;
};

/// Up-then-down sweep. `bistable` is set when the two branches disagree by more
/// than 100·rel_tol·β²/4t_c anywhere.
inline HysteresisScan hysteresis_scan(const DqdParams& dqd, const ResonatorParams& res,
                                      SpinState state, double f, std::span<const double> powers,
                                      const SolverConfig& cfg = {}, double detuning_offset = 0.0) {
    HysteresisScan scan;
    scan.up = power_sweep(dqd, res, state, f, powers, cfg, detuning_offset);
    std::vector<double> rev(powers.rbegin(), powers.rend());
    std::optional<double> warm;
    if (cfg.continuation && scan.up.back().converged) warm = scan.up.back().c_q_eff;
    scan.down = detail::sweep_in_order(dqd, res, state, f, rev, cfg, detuning_offset, warm);
    std::reverse(scan.down.begin(), scan.down.end());
    const double tol = 100.0 * cfg.rel_tol * dqd.peak_quantum_capacitance();
    for (std::size_t i = 0; i < scan.up.size(); ++i)
        if (std::abs(scan.up[i].c_q_eff - scan.down[i].c_q_eff) > tol) scan.bistable = true;
    return scan;
}

}  // namespace qdotsim
