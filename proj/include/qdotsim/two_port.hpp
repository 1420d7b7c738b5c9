#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>

#include "errors.hpp"

namespace qdotsim {

using complex = std::complex<double>;

/// Chain (ABCD) matrix of a linear two-port at one frequency:
///   [V1; I1] = [A B; C D] [V2; I2],  I2 flowing out of port 2.
struct TwoPortAbcd {
    complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static TwoPortAbcd identity() { return {}; }

    complex determinant() const { return a * d - b * c; }

    /// Z seen at port 1 with port 2 terminated in z_load.
    complex input_impedance(complex z_load) const {
        const complex den = c * z_load + d;
        if (std::abs(den) == 0.0) throw NumericalError("input impedance: open-circuit pole");
        return (a * z_load + b) / den;
    }

    friend TwoPortAbcd operator*(const TwoPortAbcd& l, const TwoPortAbcd& r) {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
                l.c * r.b + l.d * r.d};
    }
};

struct SParams {
    complex s11, s21, s12, s22;
};

inline TwoPortAbcd element_series_impedance(complex z) { return {1.0, z, 0.0, 1.0}; }

inline TwoPortAbcd element_shunt_admittance(complex y) { return {1.0, 0.0, y, 1.0}; }

/// Uniform line of characteristic impedance z_tl and electrical length βl (rad).
/// loss_resistance is the total series resistance spread along the line; it
/// enters as attenuation αl = R/(2 z_tl) (low-loss approximation).
inline TwoPortAbcd element_tline(double z_tl, double loss_resistance, double electrical_length) {
    if (!(z_tl > 0.0)) throw ValidationError("must be > 0", "z_tl");
    if (!(loss_resistance >= 0.0)) throw ValidationError("must be >= 0", "loss_resistance");
    const complex gl{loss_resistance / (2.0 * z_tl), electrical_length};
    const complex ch = std::cosh(gl);
    const complex sh = std::sinh(gl);
    return {ch, z_tl * sh, sh / z_tl, ch};
}

inline TwoPortAbcd cascade(std::span<const TwoPortAbcd> elements) {
    if (elements.empty()) throw ValidationError("cascade of an empty element list", "elements");
    TwoPortAbcd acc = elements.front();
    for (std::size_t i = 1; i < elements.size(); ++i) acc = acc * elements[i];
    return acc;
}

inline TwoPortAbcd cascade(std::initializer_list<TwoPortAbcd> elements) {
    return cascade(std::span<const TwoPortAbcd>(elements.begin(), elements.size()));
}

/// Standard ABCD -> S conversion for a real reference impedance z0 on both ports.
inline SParams s_params(const TwoPortAbcd& n, double z0) {
    if (!(z0 > 0.0)) throw ValidationError("must be > 0", "z0");
    const complex den = n.a + n.b / z0 + n.c * z0 + n.d;
    if (!(std::abs(den) > 0.0) || !std::isfinite(std::abs(den)))
        throw NumericalError("S-parameter conversion: degenerate network");
    return {(n.a + n.b / z0 - n.c * z0 - n.d) / den, 2.0 / den, 2.0 * n.determinant() / den,
            (-n.a + n.b / z0 - n.c * z0 + n.d) / den};
}

}  // namespace qdotsim
