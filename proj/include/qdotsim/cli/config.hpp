#pragma once

// Experiment configuration: a JSON document (comments allowed) whose keys carry
// the usual lab units. Absent keys fall back to the reference profile; unknown
// keys are rejected so typos surface as validation errors with their path.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../dqd.hpp"
#include "../errors.hpp"
#include "../metrics.hpp"
#include "../readout.hpp"
#include "../resonator.hpp"
#include "../steady_state.hpp"
#include "../units.hpp"

namespace qdotsim::cli {

using nlohmann::json;

struct LinearGrid {
    double start = 0.0;
    double stop = 0.0;
    int points = 1;
    std::vector<double> values() const { return linspace(start, stop, points); }
};

struct StepGrid {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;
    std::vector<double> values() const { return arange_inclusive(start, stop, step); }
};

struct StageConfig {
    std::string name;
    double gain_db = 0.0;
    bool quantum_limited = false;   // noise temperature = h f_bare / k
    double noise_temperature_k = 0.0;
};

struct ExperimentConfig {
    // dqd
    double two_tc_over_h_ghz = 14.1;
    double lever_arm_mev_per_v = 102.0;
    double c_geo_ff = 1.9;
    double g_factor = 2.0;
    double b_field_t = 1.0;
    // resonator
    double z_tl_ohm = 4500.0;
    double z0_ohm = 50.0;
    double c_c_ff = 0.32;
    double r_tl_ohm = 17.0;
    double f_bare_ghz = 6.91;
    // noise
    double t_amb_k = 0.020;
    std::vector<StageConfig> stages{{"twpa", 28.0, true, 0.0},
                                    {"lna", 26.0, false, 5.0},
                                    {"rx", 0.0, false, 1000.0}};
    // solver
    SolverConfig solver{};
    // sweeps
    LinearGrid frequency_ghz{6.899, 6.914, 301};
    StepGrid power_dbm{-140.0, -60.0, 5.0};
    std::vector<double> t_int_us{0.1, 1.0, 10.0};
    LinearGrid t_sys_k{1.0, 40.0, 40};
    LinearGrid contour_t_int_us{0.1, 10.0, 100};
    double contour_power_dbm = -95.0;
    double contour_t_amb_k = 4.0;
    // analysis
    double measured_t_n_k = 0.46;
    bool overlay_measured = false;
    bool has_snr_n_basis = false;
    double snr_n_basis_dbhz = 89.0;
    double snr_n_basis_t_n_k = 0.46;
    double target_snr_db = 11.5;
    double t_amb_electronics_k = 4.0;
    double linecut_power_dbm = -110.0;
    LinearGrid linecut_gate_mv{-3.0, 3.0, 241};

    DqdParams dqd() const {
        return DqdParams::from_lab_units(two_tc_over_h_ghz, lever_arm_mev_per_v, c_geo_ff,
                                           g_factor, b_field_t);
    }

    ResonatorParams resonator() const {
        ResonatorParams r;
        r.z_tl = z_tl_ohm;
        r.z0 = z0_ohm;
        r.c_c = units::femtofarad(c_c_ff);
        r.r_tl = r_tl_ohm;
        r.bare_resonance_target = units::ghz(f_bare_ghz);
        return r;
    }

    NoiseChain noise_chain() const {
        NoiseChain chain{t_amb_k, {}};
        for (const auto& s : stages)
            chain.stages.push_back({s.name, units::db_to_ratio(s.gain_db),
                                    s.quantum_limited ? quantum_limit(units::ghz(f_bare_ghz))
                                                      : s.noise_temperature_k});
        return chain;
    }

    std::vector<double> powers_w() const {
        const auto dbm = power_dbm.values();
        return dbm_to_watt(dbm);
    }
};

namespace detail {

inline void check_keys(const json& j, const std::string& path, std::set<std::string> allowed) {
    if (!j.is_object()) throw ValidationError("must be an object", path.empty() ? "<root>" : path);
    for (const auto& [k, _] : j.items())
        if (!allowed.count(k))
            throw ValidationError("unknown key", path.empty() ? k : path + "." + k);
}

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline void read_number(const json& j, const std::string& path, const char* key, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) throw ValidationError("must be a number", join(path, key));
    out = v.get<double>();
    if (!std::isfinite(out)) throw ValidationError("must be finite", join(path, key));
}

inline void read_int(const json& j, const std::string& path, const char* key, int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ValidationError("must be an integer", join(path, key));
    out = v.get<int>();
}

inline void read_bool(const json& j, const std::string& path, const char* key, bool& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw ValidationError("must be true or false", join(path, key));
    out = v.get<bool>();
}

inline void read_linear(const json& j, const std::string& path, const char* key, LinearGrid& g) {
    if (!j.contains(key)) return;
    const std::string p = join(path, key);
    check_keys(j.at(key), p, {"start", "stop", "points"});
    read_number(j.at(key), p, "start", g.start);
    read_number(j.at(key), p, "stop", g.stop);
    read_int(j.at(key), p, "points", g.points);
}

inline void read_step(const json& j, const std::string& path, const char* key, StepGrid& g) {
    if (!j.contains(key)) return;
    const std::string p = join(path, key);
    check_keys(j.at(key), p, {"start", "stop", "step"});
    read_number(j.at(key), p, "start", g.start);
    read_number(j.at(key), p, "stop", g.stop);
    read_number(j.at(key), p, "step", g.step);
}

inline void validate_linear(const LinearGrid& g, const std::string& path, bool positive) {
    if (g.points < 1) throw ValidationError("grid is empty (points must be >= 1)", path + ".points");
    if (g.points > 1 && !(g.stop > g.start))
        throw ValidationError("grid must be ascending (stop > start)", path + ".stop");
    if (positive && !(g.start > 0.0)) throw ValidationError("must be > 0", path + ".start");
}

}  // namespace detail

/// Semantic checks that need more than one field. Throws ValidationError naming the field.
inline void validate(const ExperimentConfig& c) {
    if (!(c.two_tc_over_h_ghz > 0.0)) throw ValidationError("must be > 0", "dqd.two_tc_over_h_ghz");
    if (!(c.lever_arm_mev_per_v > 0.0)) throw ValidationError("must be > 0", "dqd.lever_arm_mev_per_v");
    if (!(c.c_geo_ff >= 0.0)) throw ValidationError("must be >= 0", "dqd.c_geo_ff");
    if (!(c.g_factor >= 0.0)) throw ValidationError("must be >= 0", "dqd.g_factor");
    c.dqd().validate();
    c.resonator().validate();
    if (!(c.t_amb_k >= 0.0)) throw ValidationError("must be >= 0", "noise.t_amb_k");
    for (std::size_t i = 0; i < c.stages.size(); ++i)
        if (!c.stages[i].quantum_limited && !(c.stages[i].noise_temperature_k >= 0.0))
            throw ValidationError("must be >= 0",
                                  "noise.stages[" + std::to_string(i) + "].noise_temperature_k");
    c.solver.validate();

    detail::validate_linear(c.frequency_ghz, "sweep.frequency_ghz", true);
    if (c.frequency_ghz.points < 3)
        throw ValidationError("need at least 3 points for peak interpolation", "sweep.frequency_ghz.points");
    if (!(c.power_dbm.step > 0.0)) throw ValidationError("must be > 0", "sweep.power_dbm.step");
    if (!(c.power_dbm.stop >= c.power_dbm.start))
        throw ValidationError("grid is empty (stop < start)", "sweep.power_dbm.stop");
    if (c.t_int_us.empty()) throw ValidationError("list is empty", "sweep.t_int_us");
    for (std::size_t i = 0; i < c.t_int_us.size(); ++i)
        if (!(c.t_int_us[i] > 0.0))
            throw ValidationError("must be > 0", "sweep.t_int_us[" + std::to_string(i) + "]");
    detail::validate_linear(c.t_sys_k, "sweep.t_sys_k", false);
    if (!(c.t_sys_k.start >= 0.0)) throw ValidationError("must be >= 0", "sweep.t_sys_k.start");
    detail::validate_linear(c.contour_t_int_us, "sweep.contour_t_int_us", true);
    if (!(c.contour_t_amb_k >= 0.0)) throw ValidationError("must be >= 0", "sweep.contour_t_amb_k");

    if (!(c.measured_t_n_k > 0.0)) throw ValidationError("must be > 0", "analysis.measured_t_n_k");
    if (!(c.snr_n_basis_t_n_k > 0.0))
        throw ValidationError("must be > 0", "analysis.snr_n_basis.t_n_k");
    if (!(c.t_amb_electronics_k >= 0.0))
        throw ValidationError("must be >= 0", "analysis.t_amb_electronics_k");
    detail::validate_linear(c.linecut_gate_mv, "analysis.linecut.gate_mv", false);
}

inline ExperimentConfig config_from_json(const json& root) {
    using namespace detail;
    ExperimentConfig c;
    check_keys(root, "", {"dqd", "resonator", "noise", "solver", "sweep", "analysis"});

    if (root.contains("dqd")) {
        const json& j = root.at("dqd");
        check_keys(j, "dqd",
                   {"two_tc_over_h_ghz", "lever_arm_mev_per_v", "c_geo_ff", "g_factor", "b_field_t"});
        read_number(j, "dqd", "two_tc_over_h_ghz", c.two_tc_over_h_ghz);
        read_number(j, "dqd", "lever_arm_mev_per_v", c.lever_arm_mev_per_v);
        read_number(j, "dqd", "c_geo_ff", c.c_geo_ff);
        read_number(j, "dqd", "g_factor", c.g_factor);
        read_number(j, "dqd", "b_field_t", c.b_field_t);
    }
    if (root.contains("resonator")) {
        const json& j = root.at("resonator");
        check_keys(j, "resonator",
                   {"z_tl_ohm", "z0_ohm", "c_c_ff", "r_tl_ohm", "f_bare_ghz"});
        read_number(j, "resonator", "z_tl_ohm", c.z_tl_ohm);
        read_number(j, "resonator", "z0_ohm", c.z0_ohm);
        read_number(j, "resonator", "c_c_ff", c.c_c_ff);
        read_number(j, "resonator", "r_tl_ohm", c.r_tl_ohm);
        read_number(j, "resonator", "f_bare_ghz", c.f_bare_ghz);
    }
    if (root.contains("noise")) {
        const json& j = root.at("noise");
        check_keys(j, "noise", {"t_amb_k", "stages"});
        read_number(j, "noise", "t_amb_k", c.t_amb_k);
        if (j.contains("stages")) {
            const json& st = j.at("stages");
            if (!st.is_array()) throw ValidationError("must be a list", "noise.stages");
            c.stages.clear();
            for (std::size_t i = 0; i < st.size(); ++i) {
                const std::string p = "noise.stages[" + std::to_string(i) + "]";
                check_keys(st[i], p, {"name", "gain_db", "noise_temperature_k"});
                StageConfig s;
                s.name = "stage" + std::to_string(i);
                if (st[i].contains("name")) {
                    if (!st[i].at("name").is_string()) throw ValidationError("must be a string", p + ".name");
                    s.name = st[i].at("name").get<std::string>();
                }
                read_number(st[i], p, "gain_db", s.gain_db);
                if (!st[i].contains("noise_temperature_k"))
                    throw ValidationError("missing", p + ".noise_temperature_k");
                const json& t = st[i].at("noise_temperature_k");
                if (t.is_string()) {
                    if (t.get<std::string>() != "quantum_limit")
                        throw ValidationError("must be a number or \"quantum_limit\"",
                                              p + ".noise_temperature_k");
                    s.quantum_limited = true;
                } else {
                    read_number(st[i], p, "noise_temperature_k", s.noise_temperature_k);
                }
                c.stages.push_back(s);
            }
        }
    }
    if (root.contains("solver")) {
        const json& j = root.at("solver");
        check_keys(j, "solver",
                   {"relaxation", "rel_tol", "max_iter", "continuation", "bracket_fallback",
                    "capacitance_model"});
        read_number(j, "solver", "relaxation", c.solver.relaxation);
        read_number(j, "solver", "rel_tol", c.solver.rel_tol);
        read_int(j, "solver", "max_iter", c.solver.max_iter);
        read_bool(j, "solver", "continuation", c.solver.continuation);
        read_bool(j, "solver", "bracket_fallback", c.solver.bracket_fallback);
        if (j.contains("capacitance_model")) {
            const json& m = j.at("capacitance_model");
            const std::string s = m.is_string() ? m.get<std::string>() : "";
            if (s == "fundamental") c.solver.model = CapacitanceModel::Fundamental;
            else if (s == "average") c.solver.model = CapacitanceModel::TimeAverage;
            else throw ValidationError("must be \"fundamental\" or \"average\"", "solver.capacitance_model");
        }
    }
    if (root.contains("sweep")) {
        const json& j = root.at("sweep");
        check_keys(j, "sweep",
                   {"frequency_ghz", "power_dbm", "t_int_us", "t_sys_k", "contour_t_int_us",
                    "contour_power_dbm", "contour_t_amb_k"});
        read_linear(j, "sweep", "frequency_ghz", c.frequency_ghz);
        read_step(j, "sweep", "power_dbm", c.power_dbm);
        if (j.contains("t_int_us")) {
            const json& t = j.at("t_int_us");
            if (!t.is_array()) throw ValidationError("must be a list", "sweep.t_int_us");
            c.t_int_us.clear();
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (!t[i].is_number())
                    throw ValidationError("must be a number", "sweep.t_int_us[" + std::to_string(i) + "]");
                c.t_int_us.push_back(t[i].get<double>());
            }
        }
        read_linear(j, "sweep", "t_sys_k", c.t_sys_k);
        read_linear(j, "sweep", "contour_t_int_us", c.contour_t_int_us);
        read_number(j, "sweep", "contour_power_dbm", c.contour_power_dbm);
        read_number(j, "sweep", "contour_t_amb_k", c.contour_t_amb_k);
    }
    if (root.contains("analysis")) {
        const json& j = root.at("analysis");
        check_keys(j, "analysis",
                   {"measured_t_n_k", "overlay_measured", "snr_n_basis", "target_snr_db",
                    "t_amb_electronics_k", "linecut"});
        read_number(j, "analysis", "measured_t_n_k", c.measured_t_n_k);
        read_bool(j, "analysis", "overlay_measured", c.overlay_measured);
        if (j.contains("snr_n_basis") && !j.at("snr_n_basis").is_null()) {
            const json& b = j.at("snr_n_basis");
            check_keys(b, "analysis.snr_n_basis", {"dbhz", "t_n_k"});
            if (!b.contains("dbhz")) throw ValidationError("missing", "analysis.snr_n_basis.dbhz");
            read_number(b, "analysis.snr_n_basis", "dbhz", c.snr_n_basis_dbhz);
            read_number(b, "analysis.snr_n_basis", "t_n_k", c.snr_n_basis_t_n_k);
            c.has_snr_n_basis = true;
        }
        read_number(j, "analysis", "target_snr_db", c.target_snr_db);
        read_number(j, "analysis", "t_amb_electronics_k", c.t_amb_electronics_k);
        if (j.contains("linecut")) {
            const json& l = j.at("linecut");
            check_keys(l, "analysis.linecut", {"power_dbm", "gate_mv"});
            read_number(l, "analysis.linecut", "power_dbm", c.linecut_power_dbm);
            read_linear(l, "analysis.linecut", "gate_mv", c.linecut_gate_mv);
        }
    }
    validate(c);
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("parse error: ") + e.what(), "<config>");
    }
    return config_from_json(root);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace detail {

inline json linear_json(const LinearGrid& g) {
    return {{"start", g.start}, {"stop", g.stop}, {"points", g.points}};
}

}  // namespace detail

/// Fully resolved configuration with every default filled in. Keys are sorted,
/// so dump() is canonical.
inline json to_json(const ExperimentConfig& c) {
    json stages = json::array();
    for (const auto& s : c.stages)
        stages.push_back({{"name", s.name},
                          {"gain_db", s.gain_db},
                          {"noise_temperature_k",
                           s.quantum_limited ? json("quantum_limit") : json(s.noise_temperature_k)}});
    json analysis = {{"measured_t_n_k", c.measured_t_n_k},
                     {"overlay_measured", c.overlay_measured},
                     {"target_snr_db", c.target_snr_db},
                     {"t_amb_electronics_k", c.t_amb_electronics_k},
                     {"linecut",
                      {{"power_dbm", c.linecut_power_dbm},
                       {"gate_mv", detail::linear_json(c.linecut_gate_mv)}}}};
    analysis["snr_n_basis"] = c.has_snr_n_basis
                                  ? json{{"dbhz", c.snr_n_basis_dbhz}, {"t_n_k", c.snr_n_basis_t_n_k}}
                                  : json(nullptr);
    return {{"dqd",
             {{"two_tc_over_h_ghz", c.two_tc_over_h_ghz},
              {"lever_arm_mev_per_v", c.lever_arm_mev_per_v},
              {"c_geo_ff", c.c_geo_ff},
              {"g_factor", c.g_factor},
              {"b_field_t", c.b_field_t}}},
            {"resonator",
             {{"z_tl_ohm", c.z_tl_ohm},
              {"z0_ohm", c.z0_ohm},
              {"c_c_ff", c.c_c_ff},
              {"r_tl_ohm", c.r_tl_ohm},
              {"f_bare_ghz", c.f_bare_ghz}}},
            {"noise", {{"t_amb_k", c.t_amb_k}, {"stages", stages}}},
            {"solver",
             {{"relaxation", c.solver.relaxation},
              {"rel_tol", c.solver.rel_tol},
              {"max_iter", c.solver.max_iter},
              {"continuation", c.solver.continuation},
              {"bracket_fallback", c.solver.bracket_fallback},
              {"capacitance_model", to_string(c.solver.model)}}},
            {"sweep",
             {{"frequency_ghz", detail::linear_json(c.frequency_ghz)},
              {"power_dbm",
               {{"start", c.power_dbm.start}, {"stop", c.power_dbm.stop}, {"step", c.power_dbm.step}}},
              {"t_int_us", c.t_int_us},
              {"t_sys_k", detail::linear_json(c.t_sys_k)},
              {"contour_t_int_us", detail::linear_json(c.contour_t_int_us)},
              {"contour_power_dbm", c.contour_power_dbm},
              {"contour_t_amb_k", c.contour_t_amb_k}}},
            {"analysis", analysis}};
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string config_hash(const ExperimentConfig& c) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a(to_json(c).dump());
    return os.str();
}

}  // namespace qdotsim::cli
