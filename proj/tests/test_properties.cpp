// Randomised properties over 1000 draws each.

#include <gtest/gtest.h>

#include <random>

#include "qdotsim/metrics.hpp"
#include "qdotsim/resonator.hpp"
#include "qdotsim/steady_state.hpp"

using namespace qdotsim;

namespace {

struct Draw {
    ResonatorParams res;
    double c1, c2, f;
};

Draw random_sample(std::mt19937_64& rng, bool lossless) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Draw d;
    d.res.z0 = 25.0 + 75.0 * u(rng);
    d.res.z_tl = d.res.z0 + 100.0 + 9000.0 * u(rng);
    d.res.c_c = (0.05 + 2.0 * u(rng)) * 1e-15;
    d.res.r_tl = lossless ? 0.0 : 100.0 * u(rng);
    d.res.f_halfwave = (3.0 + 12.0 * u(rng)) * 1e9;
    d.c1 = 5e-15 * u(rng);
    d.c2 = d.c1 + 2e-17 * u(rng);
    d.f = (1.0 + 15.0 * u(rng)) * 1e9;
    return d;
}

}  // namespace

TEST(Properties, PassivityAndReciprocity) {
    std::mt19937_64 rng(20261015);
    for (int i = 0; i < 1000; ++i) {
        const Draw d = random_sample(rng, false);
        const SParams s = s_params(sample_network(d.res, d.c1, d.c2, d.f), d.res.z0);
        EXPECT_LE(std::norm(s.s11) + std::norm(s.s21), 1.0 + 1e-9) << i;
        EXPECT_LE(std::norm(s.s22) + std::norm(s.s12), 1.0 + 1e-9) << i;
        EXPECT_NEAR(std::abs(s.s21 - s.s12), 0.0, 1e-9 * (1.0 + std::abs(s.s21))) << i;
    }
}

TEST(Properties, Losslessness) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Draw d = random_sample(rng, true);
        const SParams s = s_params(sample_network(d.res, d.c1, d.c2, d.f), d.res.z0);
        EXPECT_NEAR(std::norm(s.s11) + std::norm(s.s21), 1.0, 1e-9) << i;
        EXPECT_NEAR(std::norm(s.s22) + std::norm(s.s12), 1.0, 1e-9) << i;
        // Unitary columns are orthogonal.
        EXPECT_NEAR(std::abs(std::conj(s.s11) * s.s12 + std::conj(s.s21) * s.s22), 0.0, 1e-9) << i;
    }
}

TEST(Properties, EffectiveCapacitanceMonotone) {
    const DqdParams p = DqdParams::reference();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lg(-7.0, -1.5);
    for (int i = 0; i < 1000; ++i) {
        double a = std::pow(10.0, lg(rng)), b = std::pow(10.0, lg(rng));
        if (a > b) std::swap(a, b);
        if (b / a < 1.0 + 1e-6) continue;
        EXPECT_GE(effective_quantum_capacitance_closed_form(p, a), effective_quantum_capacitance_closed_form(p, b));
        EXPECT_GE(drive_capacitance(p, kSingletReadout, a, 0.0, CapacitanceModel::Fundamental),
                  drive_capacitance(p, kSingletReadout, b, 0.0, CapacitanceModel::Fundamental));
    }
}

TEST(Properties, BerMonotoneAndComplementary) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 60.0);
    for (int i = 0; i < 1000; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-9) continue;
        EXPECT_GT(ber(a), ber(b));
        const auto r = snr(a * 1e-21 + 1e-30, 0.3, 1e-6);
        EXPECT_EQ(r.ber + r.fidelity, 1.0);
    }
}

TEST(Properties, SnrNormalisedIndependentOfIntegrationTime) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double psig = std::pow(10.0, -20.0 + 8.0 * u(rng));
        const double tn = 0.02 + 30.0 * u(rng);
        const double ref = snr(psig, tn, 1e-6).snr_n_dbhz;
        for (double ti : {0.1e-6, 10e-6}) EXPECT_NEAR(snr(psig, tn, ti).snr_n_dbhz, ref, 1e-9);
    }
}

TEST(Properties, NoiseTemperatureMonotoneInFirstGain) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        NoiseChain c{0.05 * u(rng), {{"a", 1.0 + 1000.0 * u(rng), u(rng)}, {"b", 1.0 + 1000.0 * u(rng), 10.0 * u(rng)},
                                     {"c", 1.0, 2000.0 * u(rng)}}};
        const double t = noise_temperature(c);
        EXPECT_GE(t, c.t_amb + c.stages[0].noise_temperature);
        c.stages[0].gain *= 1.5;
        EXPECT_LE(noise_temperature(c), t);
    }
}

TEST(Properties, SeparationInvariantUnderCommonPhase) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const complex a(u(rng), u(rng)), b(u(rng), u(rng));
        const complex rot = std::polar(1.0, 3.2 * u(rng));
        EXPECT_NEAR(state_separation(a * rot, b * rot), state_separation(a, b), 1e-12);
    }
}
