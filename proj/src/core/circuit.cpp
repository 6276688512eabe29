#include "qkdlab/core/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdlab {

void Circuit::measure(std::size_t qubit) {
    auto it = std::lower_bound(measured.begin(), measured.end(), qubit);
    if (it == measured.end() || *it != qubit) measured.insert(it, qubit);
}

void Circuit::measure_all() {
    measured.resize(n_qubits);
    for (std::size_t q = 0; q < n_qubits; ++q) measured[q] = q;
}

void Circuit::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("circuit qubit count " + std::to_string(n_qubits) + " outside 1..24");
    }
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const GateOp& op = ops[k];
        const std::string where = "op " + std::to_string(k) + " (" + op.to_string() + "): ";
        if (op.target >= n_qubits) throw std::invalid_argument(where + "target out of range");
        if (op.control) {
            if (*op.control >= n_qubits) throw std::invalid_argument(where + "control out of range");
            if (*op.control == op.target) throw std::invalid_argument(where + "control equals target");
            if (op.kind != GateKind::X && op.kind != GateKind::Y && op.kind != GateKind::Z) {
                throw std::invalid_argument(where + "only CX, CY and CZ are supported as controlled gates");
            }
        }
        if (!std::isfinite(op.theta)) throw std::invalid_argument(where + "non-finite angle");
        if (!is_parameterized(op.kind) && op.theta != 0.0) {
            throw std::invalid_argument(where + "angle on a fixed gate");
        }
    }
    if (!std::is_sorted(barriers.begin(), barriers.end()) ||
        (!barriers.empty() && barriers.back() > ops.size())) {
        throw std::invalid_argument("barrier positions must be sorted and within the op list");
    }
    for (std::size_t k = 0; k < measured.size(); ++k) {
        if (measured[k] >= n_qubits) throw std::invalid_argument("measured qubit out of range");
        if (k > 0 && measured[k] <= measured[k - 1]) {
            throw std::invalid_argument("measured qubits must be strictly increasing");
        }
    }
}

StateVector run_circuit(const Circuit& circuit) {
    circuit.validate();
    StateVector state(circuit.n_qubits);
    state.apply(circuit.ops);
    return state;
}

StateVector run_circuit(const Circuit& circuit, std::optional<RngSeed>) { return run_circuit(circuit); }

}  // namespace qkdlab
