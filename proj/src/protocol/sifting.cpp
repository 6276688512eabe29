#include "qkdlab/protocol/sifting.hpp"

#include <stdexcept>
#include <string>

namespace qkdlab::protocol {

std::string_view verdict_code(SiftVerdict v) { return v == SiftVerdict::Accepted ? "A" : "D"; }

SiftResult make_sift_result(std::vector<SiftVerdict> verdicts) {
    SiftResult r;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (verdicts[i] == SiftVerdict::Accepted) r.accepted.push_back(i);
    }
    r.verdicts = std::move(verdicts);
    return r;
}

SiftResult sift_bb84(std::span<const BasisSpec> alice_bases, std::span<const BasisSpec> bob_bases) {
    if (alice_bases.size() != bob_bases.size()) {
        throw std::invalid_argument("sift: " + std::to_string(alice_bases.size()) + " Alice bases vs " +
                                    std::to_string(bob_bases.size()) + " Bob bases");
    }
    std::vector<SiftVerdict> v(alice_bases.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = alice_bases[i].same_as(bob_bases[i]) ? SiftVerdict::Accepted : SiftVerdict::Discarded;
    }
    return make_sift_result(std::move(v));
}

double qber(std::span<const int> alice_bits, std::span<const int> bob_bits, std::span<const std::size_t> indices) {
    if (indices.empty()) throw std::invalid_argument("qber: empty comparison set");
    std::size_t errors = 0;
    for (std::size_t i : indices) {
        if (i >= alice_bits.size() || i >= bob_bits.size()) throw std::out_of_range("qber: index out of range");
        if (alice_bits[i] != bob_bits[i]) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(indices.size());
}

}  // namespace qkdlab::protocol
