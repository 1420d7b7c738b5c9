#pragma once

// Double-quantum-dot physics: the five-level (singlet pair + (1,1) triplets)
// energy spectrum, the curvature-induced quantum capacitance, and its average
// under a sinusoidal detuning drive.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "units.hpp"

namespace qdotsim {

enum class SpinState { SingletGround, SingletExcited, TripletZero, TripletMinus, TripletPlus };

/// Readout basis: |S> is the singlet ground state, |T> the T- triplet.
inline constexpr SpinState kSingletReadout = SpinState::SingletGround;
inline constexpr SpinState kTripletReadout = SpinState::TripletMinus;

inline constexpr const char* to_string(SpinState s) {
    switch (s) {
        case SpinState::SingletGround: return "S";
        case SpinState::SingletExcited: return "S_e";
        case SpinState::TripletZero: return "T0";
        case SpinState::TripletMinus: return "T";
        case SpinState::TripletPlus: return "T+";
    }
    return "?";
}

inline constexpr bool is_triplet(SpinState s) {
    return s == SpinState::TripletZero || s == SpinState::TripletMinus || s == SpinState::TripletPlus;
}

struct DqdParams {
    double tunnel_coupling = 0.0;  // t_c [J]
    double lever_arm = 0.0;        // β [C]; ε = β·V
    double c_geo = 0.0;            // [F]
    double g_factor = 2.0;
    double b_field = 0.0;          // [T]

    /// Build from the units used in device tables: 2t_c/h in GHz, β in meV/V, C_geo in fF.
    static DqdParams from_lab_units(double two_tc_over_h_ghz, double lever_arm_mev_per_v,
                                      double c_geo_ff, double g = 2.0, double b_tesla = 0.0) {
        DqdParams p;
        p.tunnel_coupling = units::tunnel_coupling_from_gap_hz(units::ghz(two_tc_over_h_ghz));
        p.lever_arm = units::lever_arm_from_mev_per_v(lever_arm_mev_per_v);
        p.c_geo = units::femtofarad(c_geo_ff);
        p.g_factor = g;
        p.b_field = b_tesla;
        p.validate();
        return p;
    }

    /// Reference device: 2t_c/h = 14.1 GHz, β = 102 meV/V, C_geo = 1.9 fF.
    static DqdParams reference() { return from_lab_units(14.1, 102.0, 1.9); }

    void validate() const {
        if (!(tunnel_coupling > 0.0)) throw ValidationError("must be > 0", "dqd.tunnel_coupling");
        if (!(lever_arm > 0.0)) throw ValidationError("must be > 0", "dqd.lever_arm");
        if (!(c_geo >= 0.0)) throw ValidationError("must be >= 0", "dqd.c_geo");
        if (!std::isfinite(g_factor) || !std::isfinite(b_field))
            throw ValidationError("must be finite", "dqd.g_factor/b_field");
    }

    /// β²/(4 t_c): the zero-detuning, zero-drive quantum capacitance.
    double peak_quantum_capacitance() const {
        return lever_arm * lever_arm / (4.0 * tunnel_coupling);
    }
};

struct DriveSpec {
    double amplitude = 0.0;           // V_A at the readout gate [V]
    double frequency = 1.0;           // [Hz]
    double dc_detuning_offset = 0.0;  // ε₀ [J]

    void validate() const {
        if (!(amplitude >= 0.0)) throw ValidationError("must be >= 0", "drive.amplitude");
        if (!(frequency > 0.0)) throw ValidationError("must be > 0", "drive.frequency");
        if (!std::isfinite(dc_detuning_offset))
            throw ValidationError("must be finite", "drive.dc_detuning_offset");
    }
};

struct SingletLevels {
    double ground;
    double excited;
};

struct TripletLevels {
    double t0;
    double tminus;
    double tplus;
};

inline SingletLevels singlet_energies(const DqdParams& p, double detuning) {
    const double half_gap =
        0.5 * std::hypot(detuning, 2.0 * p.tunnel_coupling);  // ½√(ε² + 4t_c²)
    return {-half_gap, half_gap};
}

inline TripletLevels triplet_energies(const DqdParams& p, double detuning) {
    const double zeeman = p.g_factor * constants::bohr_magneton * p.b_field;
    const double base = 0.5 * detuning;
    return {base, base - zeeman, base + zeeman};
}

/// C_q = -β² ∂²E/∂ε² for the given state at fixed detuning.
inline double quantum_capacitance(const DqdParams& p, SpinState state, double detuning) {
    if (is_triplet(state)) return 0.0;
    const double tc2 = p.tunnel_coupling * p.tunnel_coupling;
    const double r2 = detuning * detuning + 4.0 * tc2;
    const double curvature = 2.0 * tc2 / (r2 * std::sqrt(r2));
    const double cq = p.lever_arm * p.lever_arm * curvature;
    return state == SpinState::SingletGround ? cq : -cq;
}

/// Polarisation charge of the singlet ground state, q(ε) = (β/2)·ε/√(ε²+4t_c²).
/// Its derivative with respect to gate voltage is quantum_capacitance(SingletGround).
inline double quantum_charge(const DqdParams& p, double detuning) {
    return 0.5 * p.lever_arm * detuning / std::hypot(detuning, 2.0 * p.tunnel_coupling);
}

namespace detail {

inline constexpr double kQuadRelTol = 1e-8;
inline constexpr unsigned kQuadMaxDepth = 18;

// Integrates f over [a, b] with breakpoints at the drive phases where the
// detuning crosses zero, which is where the integrand peaks.
template <typename F>
double integrate_drive_cycle(F&& f, double amplitude_energy, double offset, double a, double b) {
    std::vector<double> cuts{a, b};
    const double quarter = 0.5 * std::numbers::pi;
    for (double x = std::ceil(a / quarter) * quarter; x < b; x += quarter) cuts.push_back(x);
    if (amplitude_energy > 0.0 && std::abs(offset) < amplitude_energy) {
        const double s = std::asin(-offset / amplitude_energy);
        for (double base : {s, std::numbers::pi - s}) {
            double x = base - std::floor((base - a) / two_pi) * two_pi;
            for (; x < b; x += two_pi)
                if (x > a) cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0.0) continue;
        total += gauss_kronrod<double, 15>::integrate(f, cuts[i], cuts[i + 1], kQuadMaxDepth,
                                                     kQuadRelTol);
    }
    return total;
}

}  // namespace detail

/// Drive-cycle average of the singlet-ground quantum capacitance:
///   C_q,eff = (1/T) ∫ C_q(ε₀ + β V_A sin ωt) dt.
/// `periods` > 1 integrates over that many cycles; the result is the same by periodicity.
inline double effective_quantum_capacitance(const DqdParams& p, const DriveSpec& drive,
                                            int periods = 1) {
    drive.validate();
    if (periods < 1) throw ValidationError("must be >= 1", "periods");
    const double a = p.lever_arm * drive.amplitude;
    const double e0 = drive.dc_detuning_offset;
    if (a == 0.0) return quantum_capacitance(p, SpinState::SingletGround, e0);
    auto f = [&](double th) {
        return quantum_capacitance(p, SpinState::SingletGround, e0 + a * std::sin(th));
    };
    const double span = two_pi * periods;
    return detail::integrate_drive_cycle(f, a, e0, 0.0, span) / span;
}

/// First-harmonic (describing-function) capacitance of the nonlinear charge q(V):
/// the in-phase fundamental of q(ε₀ + β V_A sin ωt) divided by V_A, which after
/// integration by parts is (1/π) ∫ C_q(ε₀ + β V_A sin θ) cos²θ dθ.
/// This is what a time-domain circuit with the instantaneous C_q(V) characteristic
/// presents to the fundamental tone.
inline double fundamental_quantum_capacitance(const DqdParams& p, const DriveSpec& drive) {
    drive.validate();
    const double a = p.lever_arm * drive.amplitude;
    const double e0 = drive.dc_detuning_offset;
    if (a == 0.0) return quantum_capacitance(p, SpinState::SingletGround, e0);
    auto f = [&](double th) {
        const double c = std::cos(th);
        return quantum_capacitance(p, SpinState::SingletGround, e0 + a * std::sin(th)) * c * c;
    };
    return detail::integrate_drive_cycle(f, a, e0, 0.0, two_pi) / std::numbers::pi;
}

/// Which elliptic-integral convention to plug into the closed form.
enum class EllipticConvention {
    /// E(2π, m) = ∫₀^{2π} √(1 − m sin²θ) dθ with m = −β²V_A²/4t_c². Exact.
    Parameter,
    /// The integrand as typeset, √(1 − k² sin θ) with k = −β²V_A²/4t_c². Diagnostic only;
    /// NaN once the radicand turns negative (β V_A > 2 t_c).
    AsPrinted,
};

namespace detail {

/// ∫₀^{2π} √(1 − m sin²θ) dθ for m ≤ 0, via E(−n) = √(1+n)·E(n/(1+n)).
inline double full_cycle_elliptic_e(double m) {
    if (m > 0.0) throw ValidationError("parameter must be <= 0", "m");
    const double n = -m;
    const double modulus = std::sqrt(n / (1.0 + n));
    return 4.0 * std::sqrt(1.0 + n) * std::comp_ellint_2(modulus);
}

inline double full_cycle_elliptic_k(double m) {
    if (m > 0.0) throw ValidationError("parameter must be <= 0", "m");
    const double n = -m;
    const double modulus = std::sqrt(n / (1.0 + n));
    return 4.0 * std::comp_ellint_1(modulus) / std::sqrt(1.0 + n);
}

inline double full_cycle_printed_e(double k) {
    const double k2 = k * k;
    if (k2 > 1.0) return std::numeric_limits<double>::quiet_NaN();
    using boost::math::quadrature::gauss_kronrod;
    auto f = [k2](double th) { return std::sqrt(1.0 - k2 * std::sin(th)); };
    return gauss_kronrod<double, 15>::integrate(f, 0.0, std::numbers::pi, kQuadMaxDepth, 1e-12) +
           gauss_kronrod<double, 15>::integrate(f, std::numbers::pi, two_pi, kQuadMaxDepth, 1e-12);
}

}  // namespace detail

/// C_q,eff = β² t_c E(2π, −β²V_A²/4t_c²) / (2π (β²V_A² + 4t_c²)) at zero DC detuning.
inline double effective_quantum_capacitance_closed_form(
    const DqdParams& p, double amplitude, EllipticConvention conv = EllipticConvention::Parameter) {
    if (!(amplitude >= 0.0)) throw ValidationError("must be >= 0", "amplitude");
    const double tc = p.tunnel_coupling;
    const double a2 = std::pow(p.lever_arm * amplitude, 2);
    const double m = -a2 / (4.0 * tc * tc);
    const double e = conv == EllipticConvention::Parameter ? detail::full_cycle_elliptic_e(m)
                                                           : detail::full_cycle_printed_e(m);
    return p.lever_arm * p.lever_arm * tc * e / (two_pi * (a2 + 4.0 * tc * tc));
}

/// Closed form of fundamental_quantum_capacitance at zero DC detuning,
///   C_1 = β·2t_c·(E₂π(m) − K₂π(m)) / (2π V_A · βV_A),   m = −(βV_A/2t_c)²,
/// with E₂π, K₂π the complete integrals taken over a full cycle.
inline double fundamental_quantum_capacitance_closed_form(const DqdParams& p, double amplitude) {
    if (!(amplitude >= 0.0)) throw ValidationError("must be >= 0", "amplitude");
    if (amplitude == 0.0) return p.peak_quantum_capacitance();
    const double b = 2.0 * p.tunnel_coupling;
    const double a = p.lever_arm * amplitude;
    const double m = -(a * a) / (b * b);
    // (β/(2π V_A a)) [b·E₂π(m) − b·K₂π(m)]
    const double diff = detail::full_cycle_elliptic_e(m) - detail::full_cycle_elliptic_k(m);
    return p.lever_arm * b * diff / (two_pi * amplitude * a);
}

struct Adiabaticity {
    double factor;             // (2t_c/h)/f_r
    bool adiabatic;            // factor > 1
    bool near_recommended;     // factor within 10% of 2
};

inline Adiabaticity adiabaticity_factor(const DqdParams& p, double probe_frequency) {
    if (!(probe_frequency > 0.0)) throw ValidationError("must be > 0", "probe_frequency");
    const double factor = units::gap_hz_from_tunnel_coupling(p.tunnel_coupling) / probe_frequency;
    return {factor, factor > 1.0, std::abs(factor - 2.0) <= 0.2};
}

}  // namespace qdotsim
