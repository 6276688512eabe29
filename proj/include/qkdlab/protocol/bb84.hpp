#pragma once

#include <span>
#include <vector>

#include "qkdlab/core/circuit.hpp"
#include "qkdlab/protocol/basis.hpp"
#include "qkdlab/protocol/pipeline.hpp"

namespace qkdlab::protocol {

/// One party's per-qubit choices.
struct PartyRecord {
    std::vector<int> bits;
    std::vector<BasisSpec> bases;

    /// Equal lengths, bits in {0, 1}.
    void validate() const;
};

/// Alice's encodings and Bob's decodings on qubits 0..n-1, every key qubit
/// measured. Throws std::invalid_argument on an empty record or mismatched
/// lengths.
Pipeline bb84_pipeline(const PartyRecord& alice, std::span<const BasisSpec> bob_bases);

/// bb84_pipeline as a circuit, with a barrier after each stage.
Circuit build_bb84_circuit(const PartyRecord& alice, std::span<const BasisSpec> bob_bases);

}  // namespace qkdlab::protocol
