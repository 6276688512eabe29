#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qkdlab/analysis/tomography.hpp"
#include "qkdlab/cli/scenario.hpp"
#include "qkdlab/protocol/session.hpp"

namespace qkdlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAbort = 2;

/// Three-setting tomography of one transmitted qubit as it reaches Bob
/// (after Eve and the channel, before his decode).
struct TomographyRun {
    std::size_t qubit = 0;
    std::uint64_t shots = 0;
    std::array<ShotHistogram, 3> histograms;  // Z, X, Y
    analysis::PauliExpectations expectations;
    analysis::Reconstruction reconstruction;
    analysis::DensityMatrix1Q theoretical;
    double fidelity = 0.0;
};

TomographyRun run_tomography(const protocol::ResolvedSession& session, std::size_t qubit);
nlohmann::json tomography_json(const TomographyRun& run);

/// Writes session.json plus the scenario's outputs into out_dir:
/// histogram.json (statistics mode), report.csv, fidelity.json,
/// circuit.qasm and, with mitigation, mitigation.json.
/// Returns kExitAbort when the check-bit QBER exceeds the threshold.
int cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
            std::optional<std::uint64_t> seed, std::ostream& out);

/// Parses a QASM file and prints a summary. ParseError propagates.
int cmd_qasm_parse(const std::filesystem::path& file, std::ostream& out);

/// Emits the scenario's session circuit to `out_file`, or to `out` if empty.
int cmd_qasm_emit(const std::filesystem::path& scenario, const std::optional<std::filesystem::path>& out_file,
                  std::optional<std::uint64_t> seed, std::ostream& out);

/// Sweep spec: {"parameter": "eve.attacked_fraction", "values": [...],
/// "repetitions": 1}. The parameter is a dot path into the scenario document
/// (array elements by index). Writes sweep.csv with columns
/// parameter,qber_mean,qber_stderr,sift_rate,raw_error_mean in grid order.
/// raw_error_mean is the per-shot rate at which Bob's readout differs from
/// Alice's bit, averaged over all qubits before sifting.
int cmd_sweep(const std::filesystem::path& scenario, const std::filesystem::path& sweep_spec,
              const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed, std::ostream& out);

/// Writes tomography.json for one qubit.
int cmd_tomo(const std::filesystem::path& scenario, std::size_t qubit, const std::filesystem::path& out_dir,
             std::optional<std::uint64_t> seed, std::ostream& out);

/// Resolves a dot path ("eve.attacked_fraction", "bob_bases.0") to a JSON
/// pointer whose parent exists in `doc`. Throws ConfigError otherwise.
nlohmann::json::json_pointer resolve_parameter_path(const nlohmann::json& doc, const std::string& path);

}  // namespace qkdlab::cli
