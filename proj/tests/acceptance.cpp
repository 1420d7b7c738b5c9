// Acceptance suite: one PASS/FAIL line per criterion, each with its runtime budget.
//
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only (exit 1 on FAIL)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qdotsim/dqd.hpp"
#include "qdotsim/metrics.hpp"
#include "qdotsim/readout.hpp"
#include "qdotsim/resonator.hpp"
#include "qdotsim/steady_state.hpp"
#include "qdotsim/transient.hpp"

using namespace qdotsim;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const DqdParams& dqd() {
    static const DqdParams d = DqdParams::reference();
    return d;
}

const ResonatorParams& res() {
    static const ResonatorParams r = calibrated(ResonatorParams::reference(), dqd().c_geo);
    return r;
}

std::vector<double> power_grid_dbm() { return arange_inclusive(-140.0, -60.0, 5.0); }

// Frequency-shift sweep on the default 50 kHz grid, shared by criteria 3 and 4.
std::vector<ShiftPoint> shift_sweep() {
    const auto freqs = linspace(6.899e9, 6.914e9, 301);
    const auto dbm = power_grid_dbm();
    return frequency_shift(resonance_map(dqd(), res(), freqs, dbm_to_watt(dbm), {}, 1));
}

std::vector<SignalPoint> case1_sweep() {
    return signal_sweep(dqd(), res(), probe_plan(dqd(), res()).f_case1(), dbm_to_watt(power_grid_dbm()));
}

Outcome small_signal_limit() {
    const double cq0 = dqd().peak_quantum_capacitance();
    const double c = effective_quantum_capacitance(dqd(), {1e-6});
    const double rel = std::abs(c / cq0 - 1.0);
    const bool ok = rel < 1e-3 && std::abs(cq0 - 14.29e-18) < 0.005e-18;
    return {ok, fmt("C_q,eff(1 uV) = %.5f aF, beta^2/4t_c = %.5f aF, rel diff %.2e (< 1e-3)", c / 1e-18,
                    cq0 / 1e-18, rel)};
}

Outcome finite_difference_oracle() {
    const DqdParams& p = dqd();
    const double tc = p.tunnel_coupling;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double eps = u(rng) * tc;
        const double h = 5e-3 * tc;
        const double d2 = (singlet_energies(p, eps + h).ground - 2.0 * singlet_energies(p, eps).ground +
                           singlet_energies(p, eps - h).ground) /
                          (h * h);
        const double oracle = -p.lever_arm * p.lever_arm * d2;
        worst = std::max(worst, std::abs(quantum_capacitance(p, SpinState::SingletGround, eps) / oracle - 1.0));
    }
    return {worst < 1e-3, fmt("worst rel diff over 100 random eps in [-20, 20] t_c: %.2e (< 1e-3)", worst)};
}

Outcome low_power_shift() {
    const auto s = shift_sweep();
    const double df = s.front().shift / 1e6;
    const bool ok = df >= 4.0 && df <= 6.0 && s.front().converged && !s.front().at_edge;
    return {ok, fmt("dF(-140 dBm) = %.4f MHz (in [4, 6]); f_T = %.6f GHz, f_S = %.6f GHz", df,
                    s.front().f_triplet / 1e9, s.front().f_singlet / 1e9)};
}

Outcome shift_collapse() {
    const auto s = shift_sweep();
    bool monotone = true, converged = true;
    double worst_rise = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        converged = converged && s[i].converged && !s[i].at_edge;
        if (i && s[i].shift > s[i - 1].shift) {
            monotone = false;
            worst_rise = std::max(worst_rise, s[i].shift - s[i - 1].shift);
        }
    }
    const double last = s.back().shift / 1e6;
    return {monotone && converged && last < 0.5,
            fmt("monotone non-increasing: %s (largest rise %.3g Hz); dF(-60 dBm) = %.4f MHz (< 0.5); "
                "all points converged: %s",
                monotone ? "yes" : "no", worst_rise, last, converged ? "yes" : "no")};
}

Outcome signal_saturation() {
    const auto pts = case1_sweep();
    const auto dbm = power_grid_dbm();
    std::vector<double> psig;
    for (const auto& p : pts) psig.push_back(units::watt_to_dbm(p.p_sig));
    // Knee: first 5 dB step whose P_sig increment drops below 1 dB.
    std::size_t knee = psig.size();
    for (std::size_t i = 1; i < psig.size(); ++i)
        if (psig[i] - psig[i - 1] < 1.0) {
            knee = i;
            break;
        }
    bool rising = knee > 1 && knee < psig.size();
    for (std::size_t i = 1; i < knee && i < psig.size(); ++i) rising = rising && psig[i] > psig[i - 1];
    double worst = 0.0;
    for (std::size_t i = knee; i < psig.size(); ++i) worst = std::max(worst, std::abs(psig[i] - psig[i - 1]));
    bool converged = true;
    for (const auto& p : pts) converged = converged && p.converged;
    const bool ok = rising && worst < 1.0 && converged;
    return {ok, fmt("P_sig rises to the knee at %.0f dBm (%.2f dBm), then changes by at most %.3f dB per 5 dB "
                    "(< 1); P_sig(-60 dBm) = %.2f dBm",
                    knee < dbm.size() ? dbm[knee - 1] : NAN, knee < psig.size() ? psig[knee - 1] : NAN, worst,
                    psig.back())};
}

Outcome snr_ceiling() {
    const auto pts = case1_sweep();
    const auto dbm = power_grid_dbm();
    double best = -INFINITY, at = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double sn = snr(pts[i].p_sig, 0.35, 1e-6).snr_n_dbhz;
        if (sn > best) {
            best = sn;
            at = dbm[i];
        }
    }
    const double snr_1us = best - 60.0;
    const bool ok = std::abs(best - 95.0) <= 2.0 && std::abs(snr_1us - 35.0) <= 2.0;
    return {ok, fmt("max SNR_N at T_N = 0.35 K: %.2f dBHz at %.0f dBm (target 95 +/- 2); SNR(1 us) = %.2f dB "
                    "(target 35 +/- 2)",
                    best, at, snr_1us)};
}

Outcome noise_budget() {
    const double ql = quantum_limit(6.91e9);
    const double tn = noise_temperature(reference_noise_chain(6.91e9));
    const bool ok = std::abs(ql - 0.332) <= 0.001 && std::abs(tn - 0.35) <= 0.02;
    return {ok, fmt("quantum limit(6.91 GHz) = %.4f K (0.332 +/- 0.001); reference chain T_N = %.4f K "
                    "(0.35 +/- 0.02)",
                    ql, tn)};
}

Outcome ber_anchor() {
    const double b = ber(units::db_to_ratio(11.5));
    return {b >= 8e-5 && b <= 1.2e-4, fmt("BER(11.5 dB) = %.4e (in [8e-5, 1.2e-4])", b)};
}

Outcome noise_requirement() {
    const auto r = required_noise_temperature(89.0, 0.46, 11.5, 1e-6, 4.0);
    const bool ok = std::abs(r.max_t_n - 25.8) <= 0.3 && std::abs(r.max_t_sys - 21.8) <= 0.3;
    return {ok, fmt("excess %.2f dB (x%.1f N_0); max T_N = %.3f K (25.8 +/- 0.3); max T_sys = %.3f K "
                    "(21.8 +/- 0.3)",
                    r.excess_db, units::db_to_ratio(r.excess_db), r.max_t_n, r.max_t_sys)};
}

Outcome oracle_equivalence() {
    const double f = probe_plan(dqd(), res()).f_case1();
    const int settle = minimum_settle_periods(res(), dqd().c_geo);
    double worst = 0.0;
    std::string parts;
    for (double dbm : {-130.0, -110.0, -95.0}) {
        const double p = units::dbm_to_watt(dbm);
        for (SpinState st : {kSingletReadout, kTripletReadout}) {
            const auto h = solve_operating_point(dqd(), res(), st, f, p);
            const auto t = transient_oracle(dqd(), res(), st, f, p, settle, 200);
            const double dv = std::abs(std::abs(t.v_node) / std::abs(h.v_node) - 1.0);
            const double ds = std::abs(std::abs(t.s21) / std::abs(h.s.s21) - 1.0);
            worst = std::max({worst, dv, ds});
            if (!h.converged) worst = INFINITY;
            if (st == kSingletReadout) parts += fmt("; %.0f dBm |S>: dv %.1e ds %.1e", dbm, dv, ds);
        }
    }
    return {worst < 0.05, fmt("worst rel diff %.2e (< 0.05), settle %d periods, 256 steps/period%s", worst,
                              settle, parts.c_str())};
}

Outcome property_suites() {
    std::mt19937_64 rng(1015);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int passive_fail = 0, recip_fail = 0, lossless_fail = 0;
    for (int i = 0; i < 1000; ++i) {
        ResonatorParams r;
        r.z0 = 25.0 + 75.0 * u(rng);
        r.z_tl = r.z0 + 100.0 + 9000.0 * u(rng);
        r.c_c = (0.05 + 2.0 * u(rng)) * 1e-15;
        r.f_halfwave = (3.0 + 12.0 * u(rng)) * 1e9;
        const double c1 = 5e-15 * u(rng), c2 = c1 + 2e-17 * u(rng), f = (1.0 + 15.0 * u(rng)) * 1e9;
        const double loss = 100.0 * u(rng);
        r.r_tl = loss;
        const SParams s = s_params(sample_network(r, c1, c2, f), r.z0);
        if (std::norm(s.s11) + std::norm(s.s21) > 1.0 + 1e-9 || std::norm(s.s22) + std::norm(s.s12) > 1.0 + 1e-9)
            ++passive_fail;
        if (std::abs(s.s21 - s.s12) > 1e-9 * (1.0 + std::abs(s.s21))) ++recip_fail;
        r.r_tl = 0.0;
        const SParams l = s_params(sample_network(r, c1, c2, f), r.z0);
        if (std::abs(std::norm(l.s11) + std::norm(l.s21) - 1.0) > 1e-9) ++lossless_fail;
    }
    int cq_fail = 0, ber_fail = 0;
    double snr_spread = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double a = std::pow(10.0, -7.0 + 5.5 * u(rng)), b = std::pow(10.0, -7.0 + 5.5 * u(rng));
        if (a > b) std::swap(a, b);
        if (b / a > 1.0 + 1e-6 &&
            effective_quantum_capacitance_closed_form(dqd(), a) < effective_quantum_capacitance_closed_form(dqd(), b))
            ++cq_fail;
        double x = 60.0 * u(rng), y = 60.0 * u(rng);
        if (x > y) std::swap(x, y);
        if (y - x > 1e-9 && !(ber(x) > ber(y))) ++ber_fail;
        const double psig = std::pow(10.0, -20.0 + 8.0 * u(rng)), tn = 0.02 + 30.0 * u(rng);
        const double ref = snr(psig, tn, 1e-6).snr_n_dbhz;
        for (double ti : {0.1e-6, 10e-6}) snr_spread = std::max(snr_spread, std::abs(snr(psig, tn, ti).snr_n_dbhz - ref));
    }
    const bool ok = passive_fail + recip_fail + lossless_fail + cq_fail + ber_fail == 0 && snr_spread <= 1e-9;
    return {ok, fmt("1000 draws: passivity fails %d, reciprocity fails %d, losslessness fails %d, C_q,eff "
                    "monotonicity fails %d, BER monotonicity fails %d, SNR_N spread over T_int %.1e dB (<= 1e-9)",
                    passive_fail, recip_fail, lossless_fail, cq_fail, ber_fail, snr_spread)};
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, "small-signal capacitance limit", 1.0, small_signal_limit},
        {2, "finite-difference capacitance oracle", 1.0, finite_difference_oracle},
        {3, "low-power frequency shift", 30.0, low_power_shift},
        {4, "frequency-shift collapse", 60.0, shift_collapse},
        {5, "signal power saturation", 60.0, signal_saturation},
        {6, "normalised SNR ceiling", 60.0, snr_ceiling},
        {7, "noise budget", 1.0, noise_budget},
        {8, "BER anchor", 1.0, ber_anchor},
        {9, "noise-temperature requirement", 1.0, noise_requirement},
        {10, "harmonic vs transient oracle", 300.0, oracle_equivalence},
        {11, "property suites", 120.0, property_suites},
    };
    return all;
}

bool run(const Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt <= c.budget_s;
    const bool pass = o.pass && in_time;
    std::printf("[%s] criterion %d (%s): %s; runtime %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str(), dt, c.budget_s, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    bool all_pass = true, found = false;
    for (const auto& c : criteria()) {
        if (only && c.id != only) continue;
        found = true;
        all_pass = run(c) && all_pass;
    }
    if (!found) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    return all_pass ? 0 : 1;
}
