#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "units.hpp"

namespace qdotsim {

struct AmplifierStage {
    std::string name;
    double gain = 1.0;               // linear power ratio
    double noise_temperature = 0.0;  // [K]
};

/// Sample-plane ambient plus the amplifier cascade, first stage closest to the sample.
struct NoiseChain {
    double t_amb = 0.0;
    std::vector<AmplifierStage> stages;

    void validate() const {
        if (!(t_amb >= 0.0)) throw ValidationError("must be >= 0", "noise.t_amb_k");
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const std::string path = "noise.stages[" + std::to_string(i) + "]";
            if (!(stages[i].gain > 0.0)) throw ValidationError("gain must be > 0", path);
            if (!(stages[i].noise_temperature >= 0.0))
                throw ValidationError("noise temperature must be >= 0", path);
        }
    }
};

/// Noise temperature of an amplifier at the quantum limit, h f / k.
inline double quantum_limit(double frequency) {
    return constants::planck * frequency / constants::boltzmann;
}

/// Friis cascade in temperature form: T_amb + T₁ + T₂/G₁ + T₃/(G₁G₂) + ...
inline double noise_temperature(const NoiseChain& chain) {
    chain.validate();
    double total = chain.t_amb;
    double gain = 1.0;
    for (const auto& st : chain.stages) {
        total += st.noise_temperature / gain;
        gain *= st.gain;
    }
    return total;
}

/// Per-stage contribution referred to the chain input, in cascade order.
inline std::vector<double> noise_contributions(const NoiseChain& chain) {
    chain.validate();
    std::vector<double> out;
    double gain = 1.0;
    for (const auto& st : chain.stages) {
        out.push_back(st.noise_temperature / gain);
        gain *= st.gain;
    }
    return out;
}

/// TWPA (quantum limited at f_r, 28 dB) -> HEMT LNA (5 K, 26 dB) -> receiver (1000 K) at 20 mK.
inline NoiseChain reference_noise_chain(double f_r = 6.91e9) {
    return {0.020,
            {{"twpa", units::db_to_ratio(28.0), quantum_limit(f_r)},
             {"lna", units::db_to_ratio(26.0), 5.0},
             {"rx", 1.0, 1000.0}}};
}

/// |S21,0 − S21,1|²
inline double state_separation(std::complex<double> s21_ket0, std::complex<double> s21_ket1) {
    return std::norm(s21_ket0 - s21_ket1);
}

inline double signal_power(double p_rf, double separation) {
    if (!(p_rf >= 0.0)) throw ValidationError("must be >= 0", "p_rf");
    if (!(separation >= 0.0 && separation <= 4.0 + 1e-12))
        throw ValidationError("must be in [0, 4]", "separation");
    return p_rf * separation;
}

/// Gaussian tail Q(x) = ½ erfc(x/√2).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double ber(double snr_linear) {
    if (!(snr_linear >= 0.0)) throw ValidationError("must be >= 0", "snr");
    return q_function(std::sqrt(snr_linear));
}

struct ReadoutFigures {
    double p_sig = 0.0;       // [W]
    double n0 = 0.0;          // [W/Hz]
    double snr_linear = 0.0;
    double snr_db = 0.0;
    double snr_n_dbhz = 0.0;  // P_sig/N₀ in dB·Hz
    double ber = 0.5;
    double fidelity = 0.5;
};

inline ReadoutFigures snr(double p_sig, double t_n, double t_int) {
    if (!(p_sig >= 0.0)) throw ValidationError("must be >= 0", "p_sig");
    if (!(t_n > 0.0)) throw ValidationError("must be > 0", "t_n");
    if (!(t_int > 0.0)) throw ValidationError("must be > 0", "t_int");
    ReadoutFigures r;
    r.p_sig = p_sig;
    r.n0 = constants::boltzmann * t_n;
    r.snr_linear = p_sig * t_int / r.n0;
    r.snr_n_dbhz = units::ratio_to_db(p_sig / r.n0);
    r.snr_db = r.snr_n_dbhz + units::ratio_to_db(t_int);
    r.ber = ber(r.snr_linear);
    r.fidelity = 1.0 - r.ber;
    return r;
}

struct NoiseRequirement {
    double excess_db;
    double max_t_n;    // [K]
    double max_t_sys;  // [K], after removing the electronics' ambient
};

/// How much noisier the chain may get before SNR drops to the target, given a
/// reference SNR_N measured (or simulated) with noise temperature reference_t_n.
inline NoiseRequirement required_noise_temperature(double snr_n_dbhz, double reference_t_n,
                                                   double target_snr_db, double t_int,
                                                   double t_amb_electronics) {
    if (!(reference_t_n > 0.0)) throw ValidationError("must be > 0", "reference_t_n");
    if (!(t_int > 0.0)) throw ValidationError("must be > 0", "t_int");
    const double excess = snr_n_dbhz + units::ratio_to_db(t_int) - target_snr_db;
    if (excess < 0.0)
        throw ValidationError("target SNR is not reachable (excess " + std::to_string(excess) +
                                  " dB)",
                              "target_snr_db");
    const double max_tn = reference_t_n * units::db_to_ratio(excess);
    return {excess, max_tn, max_tn - t_amb_electronics};
}

/// Channel width one qubit occupies in a frequency-multiplexed line: its
/// state-dependent shift plus the resonator bandwidth.
inline double fdma_channel_estimate(double freq_shift, double resonator_bandwidth) {
    if (!(freq_shift >= 0.0)) throw ValidationError("must be >= 0", "freq_shift");
    if (!(resonator_bandwidth >= 0.0)) throw ValidationError("must be >= 0", "resonator_bandwidth");
    return freq_shift + resonator_bandwidth;
}

}  // namespace qdotsim
