#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qkdlab/core/gates.hpp"
#include "qkdlab/core/histogram.hpp"
#include "qkdlab/core/random.hpp"
#include "qkdlab/protocol/basis.hpp"
#include "qkdlab/protocol/pipeline.hpp"

namespace qkdlab::adversary {

using protocol::MeasurementBasis;
using protocol::Pipeline;

/// Intercept-resend eavesdropper.
///
/// The attacked set is either listed explicitly or drawn per qubit with
/// probability `attacked_fraction`. Eve measures in `fixed[q]` when present,
/// otherwise in a basis drawn uniformly from `basis_set` on every shot. She
/// re-prepares from her own outcome and basis only.
struct EveConfig {
    std::vector<std::size_t> attacked;
    std::optional<double> attacked_fraction;
    std::map<std::size_t, MeasurementBasis> fixed;
    std::vector<MeasurementBasis> basis_set;
    std::optional<RngSeed> seed;
};

/// Resolves `attacked_fraction` (if set) into an explicit sorted index list
/// over n qubits; otherwise validates and returns `attacked` sorted.
std::vector<std::size_t> resolve_attacked(const EveConfig& eve, std::size_t n_qubits, RngSeed seed);

/// Adds an intercept on each attacked qubit of the pipeline. Indices are
/// pipeline-local and must be key qubits; a qubit without a fixed basis needs
/// a non-empty basis_set.
Pipeline apply_intercept_resend(Pipeline pipeline, const std::vector<std::size_t>& attacked, const EveConfig& eve);

struct NoiseTarget {
    std::size_t qubit = 0;
    GateKind gate = GateKind::X;  // X, Y or Z: the controlled Pauli

    friend bool operator==(const NoiseTarget&, const NoiseTarget&) = default;
};

/// Controlled-Pauli channel disturbance driven by one ancilla.
struct NoiseAttackConfig {
    std::vector<NoiseTarget> targets;
    int ancilla_value = 1;
};

/// Appends the ancilla as the highest qubit, prepares it to ancilla_value in
/// the bit-preparation stage, and adds one controlled Pauli per target to the
/// channel stage. The ancilla is not measured. Returns the pipeline unchanged
/// when there are no targets. Throws std::invalid_argument when a target is
/// not a key qubit (the ancilla itself included) or the gate is not X/Y/Z.
Pipeline inject_controlled_pauli(Pipeline pipeline, const NoiseAttackConfig& cfg);

/// Independent per-qubit classical bit flips at readout.
/// p01 = P(read 1 | true 0), p10 = P(read 0 | true 1).
struct ReadoutNoiseModel {
    std::vector<double> p01;
    std::vector<double> p10;

    static ReadoutNoiseModel uniform(std::size_t n_qubits, double p01, double p10);
    std::size_t n_qubits() const { return p01.size(); }
    void validate() const;
    ReadoutNoiseModel slice(std::size_t first, std::size_t count) const;
};

/// Replays every shot of the histogram through the flip model. Deterministic
/// under the seed (keys visited in sorted order). Throws on dimension
/// mismatch.
ShotHistogram apply_readout_noise(const ShotHistogram& hist, const ReadoutNoiseModel& model, RngSeed seed);

enum class CalibrationMode { Full, Tensored };

/// Observed histograms for prepared computational basis states. Full mode
/// prepares all 2^n strings; tensored mode prepares 0...0 and 1...1 only.
struct CalibrationSet {
    std::size_t n_qubits = 0;
    CalibrationMode mode = CalibrationMode::Full;
    std::map<std::string, ShotHistogram> observed;  // key: prepared bitstring
};

inline constexpr std::size_t kFullCalibrationMaxQubits = 12;

/// Prepares each calibration state with X gates, samples `shots`, then
/// applies the readout model. Without an explicit mode, full calibration is
/// used up to 12 qubits and tensored above. Full mode above 12 qubits throws.
CalibrationSet build_calibration_set(std::size_t n_qubits, const ReadoutNoiseModel& model, std::uint64_t shots,
                                     RngSeed seed, std::optional<CalibrationMode> mode = std::nullopt);

}  // namespace qkdlab::adversary
