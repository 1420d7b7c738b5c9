#pragma once

// Readout experiments built on the steady-state solver: state-resolved S21
// maps, resonance shift vs power, and the two probe scenarios (case-1 at the
// |T> resonance, BASK-like; case-2 midway between the resonances, BPSK-like).

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dqd.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "resonator.hpp"
#include "steady_state.hpp"

namespace qdotsim {

inline std::vector<double> linspace(double start, double stop, int points) {
    if (points < 1) throw ValidationError("must be >= 1", "points");
    if (points == 1) return {start};
    std::vector<double> out(points);
    const double step = (stop - start) / (points - 1);
    for (int i = 0; i < points; ++i) out[i] = start + i * step;
    out.back() = stop;
    return out;
}

/// start, start+step, ... up to stop inclusive (with a half-step guard against rounding).
inline std::vector<double> arange_inclusive(double start, double stop, double step) {
    if (!(step > 0.0)) throw ValidationError("must be > 0", "step");
    if (!(stop >= start)) throw ValidationError("stop must be >= start", "stop");
    std::vector<double> out;
    const long long n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

inline std::vector<double> dbm_to_watt(std::span<const double> dbm) {
    std::vector<double> out;
    out.reserve(dbm.size());
    for (double d : dbm) out.push_back(units::dbm_to_watt(d));
    return out;
}

/// S21 over a frequency x power grid for |T> (linear) and |S> (self-consistent).
struct ResonanceMap {
    std::vector<double> frequencies;              // [Hz]
    std::vector<double> powers;                   // [W], ascending
    std::vector<complex> s21_triplet;             // [freq]
    std::vector<std::vector<OperatingPoint>> singlet;  // [freq][power]
};

inline ResonanceMap resonance_map(const DqdParams& dqd, const ResonatorParams& res,
                                  std::span<const double> frequencies,
                                  std::span<const double> powers, const SolverConfig& cfg = {},
                                  int threads = 1, double detuning_offset = 0.0) {
    if (frequencies.empty()) throw ValidationError("frequency grid is empty", "frequencies");
    ResonanceMap map;
    map.frequencies.assign(frequencies.begin(), frequencies.end());
    map.powers.assign(powers.begin(), powers.end());
    map.s21_triplet.resize(frequencies.size());
    map.singlet.resize(frequencies.size());
    // Frequencies are independent; each power axis is a continuation sweep.
    parallel_for(frequencies.size(), threads, [&](std::size_t i) {
        const double f = frequencies[i];
        map.s21_triplet[i] =
            solve_operating_point(dqd, res, kTripletReadout, f, powers.empty() ? 0.0 : powers[0], cfg)
                .s.s21;
        map.singlet[i] = power_sweep(dqd, res, kSingletReadout, f, powers, cfg, detuning_offset);
    });
    return map;
}

struct PeakEstimate {
    double frequency = 0.0;
    double magnitude = 0.0;
    bool at_edge = false;  // grid maximum on the boundary: no interpolation possible
};

/// Three-point parabola through the grid maximum of `mag`. Assumes a uniform grid.
inline PeakEstimate quadratic_peak(std::span<const double> x, std::span<const double> mag) {
    if (x.size() != mag.size() || x.empty())
        throw ValidationError("grid and data sizes differ or are empty", "peak");
    const auto it = std::max_element(mag.begin(), mag.end());
    const std::size_t i = static_cast<std::size_t>(it - mag.begin());
    if (i == 0 || i + 1 == x.size()) return {x[i], mag[i], true};
    const double y0 = mag[i - 1], y1 = mag[i], y2 = mag[i + 1];
    const double den = y0 - 2.0 * y1 + y2;
    const double h = x[i + 1] - x[i];
    const double delta = den < 0.0 ? 0.5 * (y0 - y2) / den : 0.0;  // in [-0.5, 0.5] at a true max
    return {x[i] + delta * h, y1 - 0.25 * (y0 - y2) * delta, false};
}

struct ShiftPoint {
    double p_rf = 0.0;        // [W]
    double f_triplet = 0.0;   // [Hz]
    double f_singlet = 0.0;   // [Hz]
    double shift = 0.0;       // f_triplet − f_singlet [Hz]
    bool at_edge = false;
    bool converged = true;    // every singlet grid point at this power converged
};

inline std::vector<ShiftPoint> frequency_shift(const ResonanceMap& map) {
    const std::size_t nf = map.frequencies.size();
    std::vector<double> mag(nf);
    for (std::size_t i = 0; i < nf; ++i) mag[i] = std::abs(map.s21_triplet[i]);
    const PeakEstimate t = quadratic_peak(map.frequencies, mag);
    std::vector<ShiftPoint> out;
    for (std::size_t j = 0; j < map.powers.size(); ++j) {
        bool ok = true;
        for (std::size_t i = 0; i < nf; ++i) {
            mag[i] = std::abs(map.singlet[i][j].s.s21);
            ok = ok && map.singlet[i][j].converged;
        }
        const PeakEstimate s = quadratic_peak(map.frequencies, mag);
        out.push_back({map.powers[j], t.frequency, s.frequency, t.frequency - s.frequency,
                       t.at_edge || s.at_edge, ok});
    }
    return out;
}

struct ProbePlan {
    double f_triplet;  // |T> resonance: case-1 probe
    double f_singlet;  // small-signal |S> resonance
    double f_case1() const { return f_triplet; }
    double f_case2() const { return 0.5 * (f_triplet + f_singlet); }
};

/// Locates both resonances in the linear (small-signal) limit.
inline ProbePlan probe_plan(const DqdParams& dqd, const ResonatorParams& res) {
    const double c = res.bare_resonance_target;
    const double lo = 0.95 * c, hi = 1.01 * c;
    const double f_t = peak_transmission_frequency(res, dqd.c_geo, dqd.c_geo, lo, hi, 4001, 1.0);
    const double f_s = peak_transmission_frequency(
        res, dqd.c_geo, dqd.c_geo + dqd.peak_quantum_capacitance(), lo, hi, 4001, 1.0);
    return {f_t, f_s};
}

struct SignalPoint {
    double p_rf = 0.0;  // [W]
    complex s21_triplet{};
    complex s21_singlet{};
    double separation = 0.0;
    double p_sig = 0.0;  // [W]
    double c_q_eff = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// State separation and received signal power vs probe power at a fixed frequency.
inline std::vector<SignalPoint> signal_sweep(const DqdParams& dqd, const ResonatorParams& res,
                                             double f, std::span<const double> powers,
                                             const SolverConfig& cfg = {},
                                             double detuning_offset = 0.0) {
    const auto singlet = power_sweep(dqd, res, kSingletReadout, f, powers, cfg, detuning_offset);
    const complex s21_t = solve_operating_point(dqd, res, kTripletReadout, f, powers[0], cfg).s.s21;
    std::vector<SignalPoint> out;
    out.reserve(powers.size());
    for (std::size_t j = 0; j < powers.size(); ++j) {
        SignalPoint sp;
        sp.p_rf = powers[j];
        sp.s21_triplet = s21_t;
        sp.s21_singlet = singlet[j].s.s21;
        sp.separation = state_separation(sp.s21_triplet, sp.s21_singlet);
        sp.p_sig = signal_power(sp.p_rf, sp.separation);
        sp.c_q_eff = singlet[j].c_q_eff;
        sp.iterations = singlet[j].iterations;
        sp.converged = singlet[j].converged;
        out.push_back(sp);
    }
    return out;
}

}  // namespace qdotsim
