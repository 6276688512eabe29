#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qkdlab/protocol/basis.hpp"

namespace qkdlab::protocol {

enum class SiftVerdict { Accepted, Discarded };

/// "A" or "D".
std::string_view verdict_code(SiftVerdict v);

struct SiftResult {
    std::vector<std::size_t> accepted;  // increasing
    std::vector<SiftVerdict> verdicts;  // one per transmitted qubit
};

/// Builds the accepted list from per-index verdicts.
SiftResult make_sift_result(std::vector<SiftVerdict> verdicts);

/// Accepted iff the bases agree under BasisSpec::same_as. Throws
/// std::invalid_argument on length mismatch.
SiftResult sift_bb84(std::span<const BasisSpec> alice_bases, std::span<const BasisSpec> bob_bases);

/// Mismatch fraction of a and b over `indices`. An empty index set is an
/// error rather than a zero rate.
double qber(std::span<const int> alice_bits, std::span<const int> bob_bits, std::span<const std::size_t> indices);

}  // namespace qkdlab::protocol
