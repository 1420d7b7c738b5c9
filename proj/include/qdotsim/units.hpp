#pragma once

#include <cmath>
#include <numbers>

namespace qdotsim {

/// CODATA 2018 exact/recommended values. Everything inside the library is SI.
namespace constants {
inline constexpr double planck = 6.62607015e-34;           // J s (exact)
inline constexpr double boltzmann = 1.380649e-23;          // J/K (exact)
inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J/T
}  // namespace constants

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Conversions between the lab-style configuration vocabulary and SI.
namespace units {

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }
inline double ratio_to_db(double r) { return 10.0 * std::log10(r); }

inline constexpr double ghz(double v) { return v * 1e9; }
inline constexpr double mhz(double v) { return v * 1e6; }
inline constexpr double femtofarad(double v) { return v * 1e-15; }
inline constexpr double attofarad(double v) { return v * 1e-18; }

/// 2t_c/h in Hz -> t_c in J.
inline constexpr double tunnel_coupling_from_gap_hz(double two_tc_over_h) {
    return 0.5 * constants::planck * two_tc_over_h;
}
inline constexpr double gap_hz_from_tunnel_coupling(double tc) {
    return 2.0 * tc / constants::planck;
}

/// Lever arm quoted in meV/V (β/|e| as meV of detuning per volt of gate) -> β in coulomb.
inline constexpr double lever_arm_from_mev_per_v(double mev_per_v) {
    return mev_per_v * 1e-3 * constants::elementary_charge;
}
inline constexpr double lever_arm_to_mev_per_v(double beta) {
    return beta / constants::elementary_charge * 1e3;
}

}  // namespace units
}  // namespace qdotsim
