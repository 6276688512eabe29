#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qkdlab/adversary/channel.hpp"
#include "qkdlab/core/histogram.hpp"

namespace qkdlab::analysis {

using adversary::CalibrationMode;

/// Readout confusion matrix, M[observed][prepared]. Full mode stores the
/// dense 2^n x 2^n matrix row-major; tensored mode stores one 2x2 factor per
/// qubit (factor q acts on bit q) and never materializes the product.
struct MitigationMatrix {
    CalibrationMode mode = CalibrationMode::Full;
    std::size_t n_qubits = 0;
    std::vector<double> dense;                  // full mode
    std::vector<std::array<double, 4>> factors;  // tensored mode, row-major 2x2

    std::size_t dimension() const { return std::size_t{1} << n_qubits; }

    /// Entry M[observed][prepared] in either mode.
    double at(std::size_t observed, std::size_t prepared) const;

    /// y = M x, or y = M^T x.
    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> apply_transpose(std::span<const double> x) const;

    /// Largest row sum; bounds the spectral norm of M^T M for a
    /// column-stochastic M.
    double max_row_sum() const;

    /// Columns sum to 1 within 1e-9, entries nonnegative. Throws
    /// std::domain_error otherwise.
    void validate() const;
};

/// Column `prepared` is the observed frequency vector of that calibration
/// histogram. Throws std::invalid_argument on a missing prepared state or an
/// empty histogram.
MitigationMatrix build_confusion_matrix(const adversary::CalibrationSet& cal);

enum class MitigationMethod { LeastSquares, RawInverse };
std::string_view method_name(MitigationMethod m);
MitigationMethod parse_method(std::string_view name);

/// Counts as reals, indexed like a StateVector. Least squares output is a
/// nonnegative distribution scaled by shots; raw inversion may go negative.
struct QuasiHistogram {
    std::size_t n_qubits = 0;
    std::uint64_t shots = 0;
    std::vector<double> counts;

    std::vector<double> probabilities() const;
    /// (p0, p1) of bit `qubit`.
    std::pair<double, double> marginal(std::size_t qubit) const;
};

void to_json(nlohmann::json& j, const QuasiHistogram& h);

struct SolverOptions {
    double step_tolerance = 1e-13;
    std::size_t max_iterations = 200000;
};

/// Least squares: minimize |M x - f|_2 over the probability simplex with
/// projected gradient (step 1/L, L = max row sum). Stops when no coordinate
/// moves by more than step_tolerance; throws std::runtime_error after
/// max_iterations. Raw inversion solves M x = f directly and throws
/// std::domain_error when M is singular.
QuasiHistogram mitigate(const ShotHistogram& hist, const MitigationMatrix& m,
                        MitigationMethod method = MitigationMethod::LeastSquares, const SolverOptions& options = {});

/// Euclidean projection onto {x >= 0, sum x = 1}.
std::vector<double> project_to_simplex(std::span<const double> v);

/// Half the L1 distance. Throws std::invalid_argument on size mismatch.
double tvd(std::span<const double> a, std::span<const double> b);

}  // namespace qkdlab::analysis
