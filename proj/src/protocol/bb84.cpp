#include "qkdlab/protocol/bb84.hpp"

#include <stdexcept>

namespace qkdlab::protocol {

void PartyRecord::validate() const {
    if (bits.size() != bases.size()) throw std::invalid_argument("party record: bits and bases differ in length");
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("party record: bits must be 0 or 1");
    }
}

Pipeline bb84_pipeline(const PartyRecord& alice, std::span<const BasisSpec> bob_bases) {
    alice.validate();
    if (alice.bits.empty()) throw std::invalid_argument("bb84: empty record");
    if (bob_bases.size() != alice.bits.size()) throw std::invalid_argument("bb84: Bob's basis list length differs");
    if (alice.bits.size() > kMaxQubits) throw std::invalid_argument("bb84: too many qubits for one circuit");
    Pipeline p = Pipeline::with_qubits(alice.bits.size());
    for (std::size_t i = 0; i < alice.bits.size(); ++i) {
        p.add_preparation(i, encode_ops(alice.bits[i], alice.bases[i]));
        p.add_measurement_basis(i, decode_ops(bob_bases[i]));
    }
    return p;
}

Circuit build_bb84_circuit(const PartyRecord& alice, std::span<const BasisSpec> bob_bases) {
    return bb84_pipeline(alice, bob_bases).to_circuit();
}

}  // namespace qkdlab::protocol
