#include <gtest/gtest.h>

#include "qdotsim/dqd.hpp"
#include "qdotsim/resonator.hpp"

using namespace qdotsim;

namespace {

const DqdParams kDqd = DqdParams::reference();

const ResonatorParams& calibrated_reference() {
    static const ResonatorParams r = calibrated(ResonatorParams::reference(), kDqd.c_geo);
    return r;
}

}  // namespace

TEST(Resonator, ValidationNamesField) {
    ResonatorParams r;
    r.z_tl = 10.0;
    try {
        r.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "resonator.z_tl_ohm");
    }
    EXPECT_THROW(ResonatorParams{}.electrical_length(1e9), ValidationError);
}

TEST(Resonator, CalibrationHitsTarget) {
    const ResonatorParams& r = calibrated_reference();
    EXPECT_NEAR(r.f_halfwave, 9.3445724e9, 5e3);
    EXPECT_NEAR(loaded_fundamental(r, kDqd.c_geo, kDqd.c_geo), 6.91e9, 10e3);
}

TEST(Resonator, CalibrationReportsUnbracketedWindow) {
    CalibrationWindow w;
    w.lo_factor = 1.5;
    w.hi_factor = 2.0;
    EXPECT_THROW(calibrate_resonator(ResonatorParams::reference(), kDqd.c_geo, w), NumericalError);
}

TEST(Resonator, QuantumCapacitancePullsResonanceDown) {
    const ResonatorParams& r = calibrated_reference();
    const double f_t = peak_transmission_frequency(r, kDqd.c_geo, kDqd.c_geo, 6.85e9, 6.95e9);
    const double f_s = peak_transmission_frequency(r, kDqd.c_geo, kDqd.c_geo + kDqd.peak_quantum_capacitance(),
                                                   6.85e9, 6.95e9);
    EXPECT_NEAR(f_t - f_s, 5.31e6, 0.02e6);
}

TEST(Resonator, NodeVoltageScalesWithSqrtPower) {
    const ResonatorParams& r = calibrated_reference();
    const complex v1 = node_voltage_transfer(r, kDqd.c_geo, kDqd.c_geo, 6.91e9, 1e-15);
    const complex v2 = node_voltage_transfer(r, kDqd.c_geo, kDqd.c_geo, 6.91e9, 4e-15);
    EXPECT_NEAR(std::abs(v2) / std::abs(v1), 2.0, 1e-12);
    EXPECT_EQ(std::abs(node_voltage_transfer(r, kDqd.c_geo, kDqd.c_geo, 6.91e9, 0.0)), 0.0);
}

TEST(Resonator, NodeVoltageConsistentWithOutputPower) {
    // Power delivered to port 2 equals |S21|² times the available power.
    const ResonatorParams& r = calibrated_reference();
    const double p = 1e-12, f = 6.905e9;
    const SampleResponse s = evaluate_sample(r, kDqd.c_geo, kDqd.c_geo, f, p);
    const complex y_out = 1.0 / (r.z0 + 1.0 / complex(0.0, two_pi * f * r.c_c));
    const complex v_load = s.v_node * y_out * r.z0;
    EXPECT_NEAR(std::norm(v_load) / (2.0 * r.z0), std::norm(s.s.s21) * p, 1e-6 * std::norm(s.s.s21) * p);
}

TEST(Resonator, BandwidthAndQuality) {
    const ResonatorParams& r = calibrated_reference();
    const double bw = transmission_bandwidth(r, kDqd.c_geo, kDqd.c_geo, 6.91e9);
    EXPECT_GT(bw, 1e6);
    EXPECT_LT(bw, 10e6);
}

TEST(Resonator, LumpedLineTotals) {
    const double w = two_pi * 6.91e9;
    EXPECT_NEAR(lumped_line_capacitance(w, 4500.0), 16.0798e-15, 1e-19);
    EXPECT_NEAR(lumped_line_inductance(w, 4500.0) * lumped_line_capacitance(w, 4500.0),
                std::pow(std::numbers::pi / w, 2), 1e-30);
}

TEST(Resonator, LumpedEstimateTracksDistributedShift) {
    const ResonatorParams& r = calibrated_reference();
    const double cq = kDqd.peak_quantum_capacitance();
    EXPECT_DOUBLE_EQ(lumped_resonance_estimate(r, kDqd.c_geo, 0.0), 6.91e9);
    const double lumped_shift = 6.91e9 - lumped_resonance_estimate(r, kDqd.c_geo, cq);
    const double dist_shift =
        6.91e9 - peak_transmission_frequency(r, kDqd.c_geo, kDqd.c_geo + cq, 6.85e9, 6.95e9);
    // The lumped picture spreads C_q over the whole line; the distributed one
    // places it at a voltage antinode. Same order, same sign.
    EXPECT_GT(lumped_shift, 0.0);
    EXPECT_NEAR(lumped_shift / dist_shift, 1.0, 0.6);
}

TEST(Resonator, LocatePeakFindsParabolaVertex) {
    auto f = [](double x) { return 1.0 - (x - 0.3141) * (x - 0.3141); };
    EXPECT_NEAR(locate_peak(f, -1.0, 1.0, 11, 1e-9), 0.3141, 1e-8);
    EXPECT_THROW(locate_peak(f, 1.0, -1.0, 11, 1e-9), ValidationError);
}
