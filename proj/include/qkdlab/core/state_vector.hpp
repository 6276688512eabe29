#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qkdlab/core/gates.hpp"
#include "qkdlab/core/random.hpp"

namespace qkdlab {

inline constexpr std::size_t kMaxQubits = 24;
inline constexpr double kNormTolerance = 1e-10;

/// Dense pure state over n qubits. Basis index bit q holds qubit q, so index 1
/// is |0...01> with q[0] = 1.
class StateVector {
public:
    /// |0...0> on n qubits; throws std::invalid_argument outside 1..24.
    explicit StateVector(std::size_t n_qubits);

    /// Takes ownership of amplitudes; length must be 2^n with n in 1..24, every
    /// component finite and the norm 1 within kNormTolerance.
    static StateVector from_amplitudes(std::vector<Amplitude> amps);

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const;

    /// In-place gate application. Throws std::out_of_range on bad indices and
    /// std::domain_error if the result is not finite.
    void apply(const GateOp& op);
    void apply(std::span<const GateOp> ops);

    /// Projects qubit onto |outcome> and renormalizes. Throws
    /// std::domain_error when that branch has (numerically) zero probability.
    void project(std::size_t qubit, int outcome);

    /// P(qubit = 1).
    double probability_one(std::size_t qubit) const;

private:
    StateVector() = default;
    void check_index(std::size_t q) const;

    std::size_t n_qubits_ = 0;
    std::vector<Amplitude> amps_;
};

StateVector new_state(std::size_t n_qubits);

/// Value-semantics wrapper over StateVector::apply.
StateVector apply_gate(StateVector state, const GateOp& op);

/// |<a|b>|, the global-phase-free overlap magnitude.
double overlap(const StateVector& a, const StateVector& b);

/// p(index) = |amp(index)|^2, indexed like the amplitudes.
std::vector<double> exact_probabilities(const StateVector& state);

/// Marginal P(qubit = 1) from an index-ordered probability vector.
double marginal_one(std::span<const double> probabilities, std::size_t qubit);

/// Key string for a basis index: rightmost character is q[0].
std::string to_bitstring(std::size_t index, std::size_t n_qubits);

/// Samples one qubit, then collapses onto the drawn outcome.
std::pair<int, StateVector> collapse(const StateVector& state, std::size_t qubit, Rng& rng);

}  // namespace qkdlab
