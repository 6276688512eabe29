#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/core/gates.hpp"

namespace qkdlab::protocol {

enum class BasisAlias { X, Y, HT, HZ };

/// Equatorial encoding basis: |0> -> H -> P(phase). The aliases pin the phase
/// and select the named gate instead of a generic P: X = 0 (bare H),
/// Y = -pi/2 (S), HT = pi/4 (T), HZ = pi (Z).
struct BasisSpec {
    double phase = 0.0;
    std::optional<BasisAlias> alias;

    static BasisSpec named(BasisAlias a);
    static BasisSpec from_phase(double phase) { return BasisSpec{phase, std::nullopt}; }

    /// Alias name, or the phase in radians for anonymous bases.
    std::string name() const;

    /// Alias-or-phase equality: equal aliases, or phases within 1e-12.
    bool same_as(const BasisSpec& other) const;
};

double alias_phase(BasisAlias a);
std::string_view alias_name(BasisAlias a);

/// "X", "Y", "HT", "HZ". Throws std::invalid_argument otherwise.
BasisAlias parse_alias(std::string_view name);

/// The two standard basis sets: {X, Y} (conjugate pair) and {X, Y, HT, HZ}.
std::vector<BasisSpec> two_basis_set();
std::vector<BasisSpec> four_basis_set();

/// Alice's preparation on one qubit: [X if bit] H [P(phase) unless phase 0].
std::vector<GateOp> encode_ops(int bit, const BasisSpec& basis, std::size_t target = 0);

/// Bob's rotation back to the computational basis: [P(-phase)] H. For the
/// aliases this yields Sdg H, Tdg H, H and Z H.
std::vector<GateOp> decode_ops(const BasisSpec& basis, std::size_t target = 0);

/// A measurement basis as the channel sees it: the rotation that maps it to
/// Z before readout, and the preparation of each of its two states from |0>.
/// Covers both equatorial bases and the computational basis used by SARG04.
/// Gate targets are qubit 0; retarget() moves them.
struct MeasurementBasis {
    std::string name;
    std::vector<GateOp> decode;
    std::array<std::vector<GateOp>, 2> prepare;

    static MeasurementBasis equatorial(const BasisSpec& basis);
    static MeasurementBasis computational();
    /// SARG04 reference bit: 0 = computational, 1 = Hadamard (equatorial X).
    static MeasurementBasis sarg_reference(int y);
};

/// Single-qubit op list with every target set to `target`.
std::vector<GateOp> retarget(std::vector<GateOp> ops, std::size_t target);

}  // namespace qkdlab::protocol
