#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "qkdlab/core/circuit.hpp"
#include "qkdlab/core/gates.hpp"
#include "qkdlab/core/histogram.hpp"
#include "qkdlab/core/state_vector.hpp"
#include "qkdlab/protocol/basis.hpp"

namespace qkdlab::analysis {

enum class PauliAxis { Z, X, Y };
inline constexpr std::array<PauliAxis, 3> kPauliAxes = {PauliAxis::Z, PauliAxis::X, PauliAxis::Y};

std::string_view axis_name(PauliAxis a);

/// Pre-rotation mapping the axis eigenbasis onto Z: none, H, or S then H.
/// With S = diag(1, -i), S·H sends (|0> + i|1>)/sqrt(2) to |0>.
std::vector<GateOp> tomography_rotation(PauliAxis axis, std::size_t target = 0);

/// One circuit per axis (Z, X, Y order): the rotation on `target` followed
/// by a measurement of that qubit.
std::array<Circuit, 3> tomography_settings(std::size_t target, std::size_t n_qubits = 1);

struct PauliExpectations {
    double ex = 0.0;
    double ey = 0.0;
    double ez = 0.0;

    double bloch_norm() const;
};

/// Each expectation is p0 - p1 of histogram bit `qubit` under its setting.
/// Throws std::invalid_argument on an empty histogram.
PauliExpectations estimate_expectations(const ShotHistogram& hist_z, const ShotHistogram& hist_x,
                                        const ShotHistogram& hist_y, std::size_t qubit);

/// Infinite-shot expectations of one qubit of a state.
PauliExpectations exact_expectations(const StateVector& state, std::size_t qubit);

/// Single-qubit density matrix. Hermitian, unit trace, eigenvalues >= -1e-10.
struct DensityMatrix1Q {
    Mat2 m;

    static DensityMatrix1Q from_bloch(double x, double y, double z);
    /// |psi><psi| of a 1-qubit state.
    static DensityMatrix1Q pure(const StateVector& psi);

    /// Throws std::domain_error when an invariant fails beyond 1e-10.
    void validate() const;
    std::array<double, 2> eigenvalues() const;
};

inline constexpr double kBlochSlack = 0.05;

struct Reconstruction {
    DensityMatrix1Q rho;
    double bloch_norm = 0.0;  // before rescaling
    bool rescaled = false;
};

/// rho = (I + ex X + ey Y + ez Z) / 2. A Bloch norm in (1, 1.05] is scaled
/// back to the sphere and flagged; anything larger throws std::domain_error.
Reconstruction reconstruct_rho(const PauliExpectations& e);

/// Projector onto the state prepared from |0> by `ops` (single qubit).
DensityMatrix1Q pure_rho(const std::vector<GateOp>& ops);

/// Projector onto encode_ops(bit, basis)|0>.
DensityMatrix1Q theoretical_rho(int bit, const protocol::BasisSpec& basis);

/// Determinants below this are treated as exactly zero (pure state).
inline constexpr double kPureDetCutoff = 1e-14;

/// Uhlmann fidelity, qubit closed form
/// F = sqrt(tr(rho sigma) + 2 sqrt(det rho det sigma)), clamped to [0, 1].
/// Equals sqrt(<psi|rho|psi>) for pure sigma. Validates both inputs.
double fidelity(const DensityMatrix1Q& rho, const DensityMatrix1Q& sigma);

}  // namespace qkdlab::analysis
