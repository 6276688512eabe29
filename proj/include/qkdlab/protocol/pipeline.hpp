#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qkdlab/core/circuit.hpp"
#include "qkdlab/core/histogram.hpp"
#include "qkdlab/protocol/basis.hpp"

namespace qkdlab::protocol {

/// An eavesdropper tap on one qubit. Each shot picks one candidate basis
/// uniformly (a single candidate means a fixed basis), rotates into it,
/// collapses the qubit, and re-prepares the observed state in that basis.
struct Intercept {
    std::size_t qubit = 0;
    std::vector<MeasurementBasis> candidates;
};

/// One transmission from Alice to Bob, stage by stage:
///
///   bit_prep | encode | intercepts | channel | decode | measure
///
/// Qubits [0, key_qubits) carry the transmission; anything above is an
/// ancilla added by a channel model. Ops inside a stage are ordered by qubit.
struct Pipeline {
    std::size_t n_qubits = 0;
    std::size_t key_qubits = 0;
    std::vector<GateOp> bit_prep;
    std::vector<GateOp> encode;
    std::vector<Intercept> intercepts;
    std::vector<GateOp> channel;
    std::vector<GateOp> decode;
    std::vector<std::size_t> measured;
    RngSeed eve_seed;  // drives the per-shot basis choice of every intercept

    /// Pipeline with key qubits only, everything measured.
    static Pipeline with_qubits(std::size_t n);

    /// Appends one qubit's preparation; a leading X goes to bit_prep, the
    /// rest to encode. Ops must target qubit 0; they are moved to `qubit`.
    void add_preparation(std::size_t qubit, const std::vector<GateOp>& ops);
    void add_measurement_basis(std::size_t qubit, const std::vector<GateOp>& ops);

    /// Circuit with a barrier after each stage, matching the figure layout.
    /// Throws std::logic_error when intercepts are present: mid-circuit
    /// collapse has no Circuit representation.
    Circuit to_circuit() const;
};

/// Samples `shots` runs. Without intercepts the final state is computed once
/// and sampled multinomially; with intercepts every shot is evolved on its own
/// with a true collapse at each tap.
ShotHistogram run_pipeline(const Pipeline& pipeline, std::uint64_t shots, RngSeed seed);

/// Exact P(1) for each measured qubit (in `measured` order), enumerating every
/// intercept basis and outcome branch. Returns nullopt when the branch count
/// would exceed `max_branches`.
std::optional<std::vector<double>> exact_marginals(const Pipeline& pipeline, std::size_t max_branches = 1U << 16);

}  // namespace qkdlab::protocol
