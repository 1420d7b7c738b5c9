// Walks the reference sample from device parameters to readout fidelity:
// calibrate the resonator, locate both state resonances, sweep probe power at
// the |T> resonance and report where the normalised SNR saturates.

#include <cstdio>

#include "qdotsim/metrics.hpp"
#include "qdotsim/readout.hpp"

int main() {
    using namespace qdotsim;
    const DqdParams dqd = DqdParams::reference();
    const ResonatorParams res = calibrated(ResonatorParams::reference(), dqd.c_geo);
    std::printf("bare half-wave frequency  %.6f GHz\n", res.f_halfwave / 1e9);

    const ProbePlan plan = probe_plan(dqd, res);
    std::printf("|T> resonance             %.6f GHz\n", plan.f_triplet / 1e9);
    std::printf("|S> resonance (linear)    %.6f GHz  (shift %.3f MHz)\n", plan.f_singlet / 1e9,
                (plan.f_triplet - plan.f_singlet) / 1e6);

    const double t_n = noise_temperature(reference_noise_chain());
    std::printf("chain noise temperature   %.4f K\n\n", t_n);

    const auto dbm = arange_inclusive(-140, -60, 10);
    const auto pts = signal_sweep(dqd, res, plan.f_case1(), dbm_to_watt(dbm));
    std::printf("%8s %12s %10s %12s %10s %10s\n", "P_RF/dBm", "separation", "P_sig/dBm", "SNR_N/dBHz",
                "SNR@1us", "BER@1us");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const ReadoutFigures f = snr(pts[i].p_sig, t_n, 1e-6);
        std::printf("%8.0f %12.5f %10.2f %12.2f %10.2f %10.2e%s\n", dbm[i], pts[i].separation,
                    units::watt_to_dbm(pts[i].p_sig), f.snr_n_dbhz, f.snr_db, f.ber,
                    pts[i].converged ? "" : "  (not converged)");
    }
    return 0;
}
