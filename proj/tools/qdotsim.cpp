// qdotsim: figure tables for gate-based RF readout of a DQD spin qubit.
//
//   qdotsim <subcommand> --config <path> --out <path> [--format csv|doc]
//           [--threads N] [--power-dbm a:b:step] [--tn-kelvin X]
//
// Exit codes: 0 ok, 1 validation, 2 more than 10% of rows failed to converge, 3 I/O.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdotsim/cli/commands.hpp"
#include "qdotsim/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace qdotsim;
    CLI::App app{"Gate-based RF readout simulator for DQD spin qubits"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", power_range;
    std::optional<int> threads;
    std::optional<double> tn_kelvin;
    bool fixed_timestamp = false;

    for (const auto& [name, _] : cli::commands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_path, "output file")->required();
        sub->add_option("--format", format, "csv or doc")->check(CLI::IsMember({"csv", "doc"}));
        sub->add_option("--threads", threads, "worker threads (default: $QDOTSIM_THREADS)");
        sub->add_option("--power-dbm", power_range, "power grid start:stop:step [dBm]");
        sub->add_option("--tn-kelvin", tn_kelvin, "override the chain noise temperature [K]");
        sub->add_flag("--no-timestamp", fixed_timestamp, "omit the wall-clock timestamp");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        cli::RunContext ctx;
        ctx.cfg = cli::load_config(config_path);
        if (!power_range.empty()) {
            ctx.cfg.power_dbm = cli::parse_power_range(power_range);
            cli::validate(ctx.cfg);
        }
        ctx.threads = resolve_thread_count(threads);
        ctx.tn_kelvin = tn_kelvin;
        ctx.timestamp = fixed_timestamp ? "" : utc_timestamp();

        const auto tables = cli::commands().at(command)(ctx);
        cli::write_file(out_path, cli::render(tables, format == "doc" ? cli::OutputFormat::Doc
                                                                       : cli::OutputFormat::Csv));
        const double failed = cli::failure_fraction(tables);
        if (failed > 0.10) {
            std::cerr << "qdotsim: " << command << ": " << failed * 100.0
                      << "% of rows did not converge (table written to " << out_path << ")\n";
            return kExitSolver;
        }
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << "qdotsim: invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "qdotsim: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "qdotsim: numerical failure: " << e.what() << '\n';
        return kExitSolver;
    }
}
