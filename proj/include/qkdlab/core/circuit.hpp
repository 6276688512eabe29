#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qkdlab/core/gates.hpp"
#include "qkdlab/core/random.hpp"
#include "qkdlab/core/state_vector.hpp"

namespace qkdlab {

/// Ordered gate list with terminal measurement. Barriers carry no semantics;
/// they are kept so emitted QASM lines up with the stage layout of the
/// protocol figures. barriers[k] = number of ops preceding that barrier.
struct Circuit {
    std::size_t n_qubits = 0;
    std::vector<GateOp> ops;
    std::vector<std::size_t> barriers;  // non-decreasing, each <= ops.size()
    std::vector<std::size_t> measured;  // strictly increasing

    Circuit() = default;
    explicit Circuit(std::size_t n) : n_qubits(n) {}

    void add(const GateOp& op) { ops.push_back(op); }
    void add(std::span<const GateOp> more) { ops.insert(ops.end(), more.begin(), more.end()); }
    void barrier() { barriers.push_back(ops.size()); }
    void measure(std::size_t qubit);
    void measure_all();

    /// Throws std::invalid_argument describing the first violation: qubit
    /// count outside 1..24, index out of range, control == target, controlled
    /// gate other than X/Y/Z, non-finite angle, unsorted barriers/measured.
    void validate() const;

    friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Applies every op to |0...0>. Sampling is separate (measure_all).
StateVector run_circuit(const Circuit& circuit);

/// The seed is accepted for interface symmetry with the sampling calls and
/// has no effect: circuit evolution is deterministic.
StateVector run_circuit(const Circuit& circuit, std::optional<RngSeed> seed);

}  // namespace qkdlab
