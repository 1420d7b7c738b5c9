#pragma once

// Circuit model of the readout sample: port 1 -> C_c -> [DQD1 shunt] -> R/2 ->
// half-wave line -> R/2 -> [DQD2 shunt] -> C_c -> port 2. The DQD shunts sit at
// the two line ends, which are the voltage antinodes of the half-wave mode.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "two_port.hpp"
#include "units.hpp"

namespace qdotsim {

struct ResonatorParams {
    double z_tl = 4500.0;                  // [Ω]
    double z0 = 50.0;                      // [Ω]
    double c_c = 0.32e-15;                 // each coupling capacitor [F]
    double r_tl = 17.0;                    // total series loss [Ω]
    double bare_resonance_target = 6.91e9; // loaded |T> resonance to calibrate to [Hz]
    double f_halfwave = 0.0;               // bare-line half-wave frequency; 0 until calibrated

    static ResonatorParams reference() { return {}; }

    bool calibrated() const { return f_halfwave > 0.0; }

    void validate() const {
        if (!(z0 > 0.0)) throw ValidationError("must be > 0", "resonator.z0_ohm");
        if (!(z_tl > z0)) throw ValidationError("must exceed z0", "resonator.z_tl_ohm");
        if (!(c_c > 0.0)) throw ValidationError("must be > 0", "resonator.c_c_ff");
        if (!(r_tl >= 0.0)) throw ValidationError("must be >= 0", "resonator.r_tl_ohm");
        if (!(bare_resonance_target > 0.0))
            throw ValidationError("must be > 0", "resonator.f_bare_ghz");
    }

    /// γl at frequency f; γ is linear in ω, so γl = π f / f_halfwave.
    double electrical_length(double f) const {
        if (!calibrated()) throw ValidationError("resonator is not calibrated", "resonator.f_halfwave");
        return std::numbers::pi * f / f_halfwave;
    }
};

namespace detail {

inline complex capacitor_impedance(double c, double f) {
    return 1.0 / complex(0.0, two_pi * f * c);
}

// Network from port 1 up to and including the DQD2 shunt.
inline TwoPortAbcd sample_head(const ResonatorParams& r, double dqd1_cap, double dqd2_cap,
                               double f) {
    const double w = two_pi * f;
    return cascade({element_series_impedance(capacitor_impedance(r.c_c, f)),
                    element_shunt_admittance(complex(0.0, w * dqd1_cap)),
                    element_series_impedance(0.5 * r.r_tl),
                    element_tline(r.z_tl, 0.0, r.electrical_length(f)),
                    element_series_impedance(0.5 * r.r_tl),
                    element_shunt_admittance(complex(0.0, w * dqd2_cap))});
}

inline TwoPortAbcd sample_tail(const ResonatorParams& r, double f) {
    return element_series_impedance(capacitor_impedance(r.c_c, f));
}

}  // namespace detail

/// Full chain matrix of the sample. dqd1_cap is the fixed geometric load of
/// DQD1, dqd2_cap = C_geo + C_q of the readout dot.
inline TwoPortAbcd sample_network(const ResonatorParams& r, double dqd1_cap, double dqd2_cap,
                                  double f) {
    if (!(f > 0.0)) throw ValidationError("must be > 0", "frequency");
    return detail::sample_head(r, dqd1_cap, dqd2_cap, f) * detail::sample_tail(r, f);
}

/// Source EMF amplitude of a z0 generator whose available power is p_rf (peak phasor).
inline double source_emf_amplitude(double p_rf, double z0) { return std::sqrt(8.0 * p_rf * z0); }

struct SampleResponse {
    SParams s;
    complex v_node;  // peak phasor at the DQD2 gate, EMF phase reference
};

/// Solves the terminated ladder (z0 source at port 1, z0 load at port 2) and
/// returns the S-parameters together with the DQD2 node phasor.
inline SampleResponse evaluate_sample(const ResonatorParams& r, double dqd1_cap, double dqd2_cap,
                                      double f, double p_rf) {
    if (!(p_rf >= 0.0)) throw ValidationError("must be >= 0", "p_rf");
    const TwoPortAbcd head = detail::sample_head(r, dqd1_cap, dqd2_cap, f);
    const TwoPortAbcd tail = detail::sample_tail(r, f);
    const TwoPortAbcd full = head * tail;
    const SParams s = s_params(full, r.z0);
    const complex den = full.a + full.b / r.z0 + full.c * r.z0 + full.d;
    const complex v_load = source_emf_amplitude(p_rf, r.z0) / den;
    const complex v_node = v_load * (tail.a + tail.b / r.z0);
    return {s, v_node};
}

inline complex node_voltage_transfer(const ResonatorParams& r, double dqd1_cap, double dqd2_cap,
                                     double f, double p_rf) {
    return evaluate_sample(r, dqd1_cap, dqd2_cap, f, p_rf).v_node;
}

inline complex sample_input_impedance(const ResonatorParams& r, double dqd1_cap, double dqd2_cap,
                                      double f) {
    return sample_network(r, dqd1_cap, dqd2_cap, f).input_impedance(r.z0);
}

/// Maximum of a unimodal-near-the-top function: coarse scan, then golden section
/// on the bracket around the best sample. Deterministic for a given input.
template <typename F>
double locate_peak(F&& fn, double lo, double hi, int coarse_points, double x_tol) {
    if (!(hi > lo) || coarse_points < 3) throw ValidationError("empty peak search window");
    const double step = (hi - lo) / (coarse_points - 1);
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < coarse_points; ++i) {
        const double v = fn(lo + i * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = lo + std::max(best - 1, 0) * step;
    double b = lo + std::min(best + 1, coarse_points - 1) * step;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = fn(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = fn(x1);
        }
    }
    return 0.5 * (a + b);
}

/// Frequency of maximum |S21| for a fixed DQD2 load, searched in [lo, hi].
inline double peak_transmission_frequency(const ResonatorParams& r, double dqd1_cap,
                                          double dqd2_cap, double lo, double hi,
                                          int coarse_points = 2001, double tol_hz = 1.0) {
    auto mag = [&](double f) { return std::abs(s_params(sample_network(r, dqd1_cap, dqd2_cap, f), r.z0).s21); };
    return locate_peak(mag, lo, hi, coarse_points, tol_hz);
}

/// Loaded fundamental of the sample for a given bare half-wave frequency.
inline double loaded_fundamental(const ResonatorParams& r, double dqd1_cap, double dqd2_cap) {
    return peak_transmission_frequency(r, dqd1_cap, dqd2_cap, 0.3 * r.f_halfwave,
                                       1.05 * r.f_halfwave, 8001, 1.0);
}

struct CalibrationWindow {
    double lo_factor = 0.5;  // f_halfwave search window, relative to the target
    double hi_factor = 4.0;
    double tol_hz = 10e3;
};

/// Bisection on the bare half-wave frequency so that the |T>-state network
/// (both DQD shunts = c_geo) peaks at bare_resonance_target. Returns f_halfwave.
inline double calibrate_resonator(const ResonatorParams& res, double c_geo,
                                  CalibrationWindow window = {}) {
    res.validate();
    ResonatorParams r = res;
    const double target = r.bare_resonance_target;
    auto miss = [&](double fhw) {
        r.f_halfwave = fhw;
        return loaded_fundamental(r, c_geo, c_geo) - target;
    };
    double lo = window.lo_factor * target, hi = window.hi_factor * target;
    double m_lo = miss(lo), m_hi = miss(hi);
    if (!(m_lo < 0.0 && m_hi > 0.0)) {
        std::ostringstream os;
        os << "calibration window [" << lo << ", " << hi << "] Hz does not bracket the target "
           << target << " Hz (loaded peaks miss by " << m_lo << " and " << m_hi << " Hz)";
        throw NumericalError(os.str());
    }
    // Bisect until the loaded peak lands within a tenth of the tolerance.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double m = miss(mid);
        if (std::abs(m) <= 0.1 * window.tol_hz) return mid;
        (m < 0.0 ? lo : hi) = mid;
    }
    throw NumericalError("calibration bisection did not converge");
}

inline ResonatorParams calibrated(ResonatorParams r, double c_geo, CalibrationWindow window = {}) {
    r.f_halfwave = calibrate_resonator(r, c_geo, window);
    return r;
}

/// -3 dB bandwidth of |S21| around a peak at f_peak for a fixed load.
inline double transmission_bandwidth(const ResonatorParams& r, double dqd1_cap, double dqd2_cap,
                                     double f_peak) {
    auto mag = [&](double f) { return std::abs(s_params(sample_network(r, dqd1_cap, dqd2_cap, f), r.z0).s21); };
    const double level = mag(f_peak) / std::sqrt(2.0);
    auto edge = [&](double dir) {
        double inner = f_peak, outer = f_peak;
        double step = 1e3;
        while (mag(outer) > level) {
            inner = outer;
            outer = f_peak + dir * step;
            step *= 2.0;
            if (step > f_peak) throw NumericalError("bandwidth: no -3 dB edge found");
        }
        for (int i = 0; i < 100 && std::abs(outer - inner) > 1.0; ++i) {
            const double mid = 0.5 * (inner + outer);
            (mag(mid) > level ? inner : outer) = mid;
        }
        return 0.5 * (inner + outer);
    };
    return edge(+1.0) - edge(-1.0);
}

/// Lumped line totals at angular frequency ω₀: C_TL = π/(ω₀ Z_TL), L_TL = π Z_TL/ω₀.
inline double lumped_line_capacitance(double omega0, double z_tl) {
    return std::numbers::pi / (omega0 * z_tl);
}
inline double lumped_line_inductance(double omega0, double z_tl) {
    return std::numbers::pi * z_tl / omega0;
}

/// ω_res = π/√(L_TL C_TL,eff) with C_TL,eff = C_TL + 2C_geo (+ C_q for |S>).
/// ω₀ is chosen so that the c_q = 0 estimate equals bare_resonance_target; the
/// estimate is a cross-check of the distributed model, not a replacement.
inline double lumped_resonance_estimate(const ResonatorParams& r, double c_geo, double c_q) {
    const double w_t = two_pi * r.bare_resonance_target;
    // ω_T² = ω₀² / (1 + 2 C_geo ω₀ Z/π)  ->  ω₀² − (2 C_geo Z/π) ω_T² ω₀ − ω_T² = 0
    const double p = 2.0 * c_geo * r.z_tl / std::numbers::pi * w_t * w_t;
    const double w0 = 0.5 * (p + std::sqrt(p * p + 4.0 * w_t * w_t));
    const double l_tl = lumped_line_inductance(w0, r.z_tl);
    const double c_eff = lumped_line_capacitance(w0, r.z_tl) + 2.0 * c_geo + c_q;
    if (c_q == 0.0) return r.bare_resonance_target;
    return std::numbers::pi / std::sqrt(l_tl * c_eff) / two_pi;
}

}  // namespace qdotsim
