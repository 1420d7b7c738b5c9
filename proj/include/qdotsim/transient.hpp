#pragma once

// Time-domain reference for the harmonic solver. The half-wave line is replaced
// by a lumped Π (shunt C_e at each end, series L_s + R_s) fitted to the odd-mode
// end admittance of the distributed line at the calibration frequency, and the
// DQD2 node carries the instantaneous C_q(ε₀ + βv). Integrated with fixed-step
// RK4; the fundamental is projected out over an integer number of periods.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "dqd.hpp"
#include "errors.hpp"
#include "resonator.hpp"

namespace qdotsim {

struct LumpedEquivalent {
    double c_end;   // C_e, line share at each end [F]
    double l_mid;   // L_s [H]
    double r_mid;   // R_s, dissipation-equivalent of the two end R_TL/2 [Ω]
    double f_map;   // frequency the map was fitted at [Hz]
};

/// Fits the Π to Y_odd(ω) = −j·cot(θ/2)/Z_TL and dY_odd/dω at res.bare_resonance_target.
inline LumpedEquivalent lumped_equivalent(const ResonatorParams& res, double c_geo) {
    const double f = res.bare_resonance_target;
    const double w = two_pi * f;
    const double half = 0.5 * res.electrical_length(f);
    const double b = -1.0 / (std::tan(half) * res.z_tl);
    const double s = std::sin(half);
    const double db = half / (res.z_tl * w * s * s);  // d/dω of −cot(θ/2)/Z with θ ∝ ω
    LumpedEquivalent eq;
    eq.c_end = 0.5 * (b / w + db);
    eq.l_mid = 4.0 / (w * w * (db - b / w));
    const double wcc_r0 = w * res.c_c * res.z0;
    const double c_ext = c_geo + res.c_c / (1.0 + wcc_r0 * wcc_r0);
    eq.r_mid = res.r_tl * std::pow(w * c_ext, 2) * std::pow(w * eq.l_mid, 2) / 4.0;
    eq.f_map = f;
    return eq;
}

struct TransientOptions {
    int steps_per_period = 256;
    std::optional<double> constant_cq;  // replaces the nonlinear characteristic
    double detuning_offset = 0.0;
};

struct TransientResult {
    complex v_node;  // fundamental at the DQD2 gate, same phase reference as evaluate_sample
    complex s21;
    long long steps = 0;
};

/// Loaded Q of the |T>-state resonance from its -3 dB bandwidth.
inline double loaded_quality_factor(const ResonatorParams& res, double c_geo) {
    const double f = res.bare_resonance_target;
    return f / transmission_bandwidth(res, c_geo, c_geo, f);
}

inline int minimum_settle_periods(const ResonatorParams& res, double c_geo) {
    return static_cast<int>(std::ceil(20.0 * loaded_quality_factor(res, c_geo) / std::numbers::pi));
}

inline TransientResult transient_oracle(const DqdParams& dqd, const ResonatorParams& res,
                                        SpinState state, double f, double p_rf,
                                        int periods_settle, int periods_measure,
                                        const TransientOptions& opt = {}) {
    if (!(p_rf >= 0.0)) throw ValidationError("must be >= 0", "p_rf");
    if (!(f > 0.0)) throw ValidationError("must be > 0", "frequency");
    if (opt.steps_per_period < 256) throw ValidationError("must be >= 256", "steps_per_period");
    if (periods_measure < 1) throw ValidationError("must be >= 1", "periods_measure");
    const int min_settle = minimum_settle_periods(res, dqd.c_geo);
    if (periods_settle < min_settle)
        throw ValidationError("must be >= 20·Q_L/π = " + std::to_string(min_settle),
                              "periods_settle");

    const LumpedEquivalent eq = lumped_equivalent(res, dqd.c_geo);
    const double w = two_pi * f;
    // Port branch (z0 in series with C_c) as its parallel equivalent at ω.
    const complex y_port = 1.0 / (res.z0 + 1.0 / complex(0.0, w * res.c_c));
    const double g_p = y_port.real();
    const double c_p = y_port.imag() / w;
    const double vs = source_emf_amplitude(p_rf, res.z0);
    const complex i_norton = vs * y_port;  // EMF = vs·cos ωt
    const complex out_ratio = res.z0 * y_port;  // V_port2 / V_node2

    const double c_a = dqd.c_geo + eq.c_end + c_p;
    const double c_b0 = dqd.c_geo + eq.c_end + c_p;

    auto c_q = [&](double v) {
        if (opt.constant_cq) return *opt.constant_cq;
        return quantum_capacitance(dqd, state, opt.detuning_offset + dqd.lever_arm * v);
    };

    using State = std::array<double, 3>;  // v_a, v_b, i_L
    auto deriv = [&](double t, const State& x) {
        const double i_s = i_norton.real() * std::cos(w * t) - i_norton.imag() * std::sin(w * t);
        return State{(i_s - g_p * x[0] - x[2]) / c_a,
                     (x[2] - g_p * x[1]) / (c_b0 + c_q(x[1])),
                     (x[0] - x[1] - eq.r_mid * x[2]) / eq.l_mid};
    };
    auto axpy = [](const State& x, double h, const State& k) {
        return State{x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]};
    };

    const int n = opt.steps_per_period;
    const double dt = 1.0 / (f * n);
    // Generous bound on the node swing; RK4 blow-up overshoots it by orders of magnitude.
    const double v_limit =
        1e3 * vs * std::sqrt(loaded_quality_factor(res, dqd.c_geo) * res.z_tl / res.z0) + 1e-12;

    std::vector<complex> twiddle(n);
    for (int k = 0; k < n; ++k) twiddle[k] = std::exp(complex(0.0, -two_pi * (k + 1) / n));

    State x{0.0, 0.0, 0.0};
    complex acc{0.0, 0.0};
    long long steps = 0;
    const int total = periods_settle + periods_measure;
    for (int period = 0; period < total; ++period) {
        for (int k = 0; k < n; ++k) {
            // Time within the current period keeps the phase argument small.
            const double t = k * dt;
            const State k1 = deriv(t, x);
            const State k2 = deriv(t + 0.5 * dt, axpy(x, 0.5 * dt, k1));
            const State k3 = deriv(t + 0.5 * dt, axpy(x, 0.5 * dt, k2));
            const State k4 = deriv(t + dt, axpy(x, dt, k3));
            for (int j = 0; j < 3; ++j) x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            ++steps;
            if (period >= periods_settle)
                acc += x[1] * twiddle[k];
        }
        if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || std::abs(x[1]) > v_limit ||
            std::abs(x[0]) > v_limit)
            throw NumericalError("transient integration diverged (step size too large)");
    }

    TransientResult out;
    out.v_node = 2.0 * acc / static_cast<double>(static_cast<long long>(periods_measure) * n);
    out.s21 = vs > 0.0 ? 2.0 * out_ratio * out.v_node / vs : complex{0.0, 0.0};
    out.steps = steps;
    return out;
}

}  // namespace qdotsim
