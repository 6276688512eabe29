#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qkdlab/cli/commands.hpp"
#include "qkdlab/qasm/qasm.hpp"

namespace fs = std::filesystem;
using namespace qkdlab;

int main(int argc, char** argv) {
    CLI::App app{"qkdlab: BB84 / SARG04 QKD laboratory on an exact statevector simulator"};
    app.require_subcommand(1);

    std::string scenario, out_dir, file, sweep_file, out_file;
    std::optional<std::uint64_t> seed;
    std::size_t qubit = 0;

    auto* run = app.add_subcommand("run", "run a scenario and write session artifacts");
    run->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seed, "override the scenario seed");

    auto* qasm_cmd = app.add_subcommand("qasm", "parse or emit OpenQASM 2.0");
    qasm_cmd->require_subcommand(1);
    auto* parse = qasm_cmd->add_subcommand("parse", "parse a .qasm file and print a summary");
    parse->add_option("file", file, "QASM source")->required()->check(CLI::ExistingFile);
    auto* emit = qasm_cmd->add_subcommand("emit", "emit the scenario's session circuit");
    emit->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    emit->add_option("--out", out_file, "output file (default: stdout)");
    emit->add_option("--seed", seed, "override the scenario seed");

    auto* sweep = app.add_subcommand("sweep", "sweep one scenario parameter over a grid");
    sweep->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("sweep", sweep_file, "sweep spec JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--seed", seed, "override the scenario seed");

    auto* tomo = app.add_subcommand("tomo", "single-qubit tomography and fidelity");
    tomo->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    tomo->add_option("--qubit", qubit, "qubit index")->required();
    tomo->add_option("--out", out_dir, "output directory")->required();
    tomo->add_option("--seed", seed, "override the scenario seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? cli::kExitOk : cli::kExitError;
    }

    try {
        if (run->parsed()) return cli::cmd_run(scenario, out_dir, seed, std::cout);
        if (parse->parsed()) return cli::cmd_qasm_parse(file, std::cout);
        if (emit->parsed()) {
            return cli::cmd_qasm_emit(scenario, out_file.empty() ? std::nullopt : std::optional<fs::path>(out_file), seed,
                                      std::cout);
        }
        if (sweep->parsed()) return cli::cmd_sweep(scenario, sweep_file, out_dir, seed, std::cout);
        if (tomo->parsed()) return cli::cmd_tomo(scenario, qubit, out_dir, seed, std::cout);
    } catch (const qasm::ParseError& e) {
        std::cerr << file << ":" << e.what() << "\n";
        return cli::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitError;
    }
    return cli::kExitError;
}
