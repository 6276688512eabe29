#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qkdlab/analysis/mitigation.hpp"
#include "qkdlab/protocol/session.hpp"

namespace qkdlab::cli {

/// Scenario problem located by a JSON pointer ("" is the document root).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string pointer, const std::string& message);
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

struct MitigationSpec {
    std::optional<analysis::CalibrationMode> mode;  // nullopt: full up to 12 qubits
    analysis::MitigationMethod method = analysis::MitigationMethod::LeastSquares;
};

inline const std::vector<std::string> kOutputKinds = {"histogram", "report", "fidelity", "qasm"};

struct Scenario {
    protocol::SessionConfig session;
    std::vector<std::string> outputs = {"histogram", "report"};
    std::optional<MitigationSpec> mitigation;
    std::optional<std::vector<double>> expected_p1;  // golden table; default is the exact oracle

    bool wants(const std::string& output) const;
};

/// Seed precedence: explicit override, then the document's "seed", then the
/// QKDLAB_SEED environment variable, then 0.
std::uint64_t select_seed(const nlohmann::json& doc, std::optional<std::uint64_t> override_seed);

/// Validates the document (unknown keys are rejected) and builds the
/// scenario. Every failure is a ConfigError naming the offending location.
Scenario parse_scenario(const nlohmann::json& doc, std::optional<std::uint64_t> override_seed = std::nullopt);

/// Reads and parses a JSON file; syntax errors become ConfigError at "".
nlohmann::json read_json_file(const std::filesystem::path& path);

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> override_seed = std::nullopt);

}  // namespace qkdlab::cli
