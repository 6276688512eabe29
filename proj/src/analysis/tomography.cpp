#include "qkdlab/analysis/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdlab::analysis {

namespace {

constexpr double kTol = 1e-10;

}  // namespace

std::string_view axis_name(PauliAxis a) {
    switch (a) {
        case PauliAxis::Z: return "Z";
        case PauliAxis::X: return "X";
        case PauliAxis::Y: return "Y";
    }
    return "?";
}

std::vector<GateOp> tomography_rotation(PauliAxis axis, std::size_t target) {
    switch (axis) {
        case PauliAxis::Z: return {};
        case PauliAxis::X: return {GateOp::single(GateKind::H, target)};
        case PauliAxis::Y: return {GateOp::single(GateKind::S, target), GateOp::single(GateKind::H, target)};
    }
    return {};
}

std::array<Circuit, 3> tomography_settings(std::size_t target, std::size_t n_qubits) {
    std::array<Circuit, 3> out;
    for (std::size_t k = 0; k < 3; ++k) {
        Circuit c(n_qubits);
        c.add(tomography_rotation(kPauliAxes[k], target));
        c.measure(target);
        c.validate();
        out[k] = std::move(c);
    }
    return out;
}

double PauliExpectations::bloch_norm() const { return std::sqrt(ex * ex + ey * ey + ez * ez); }

PauliExpectations estimate_expectations(const ShotHistogram& hist_z, const ShotHistogram& hist_x,
                                        const ShotHistogram& hist_y, std::size_t qubit) {
    auto e = [qubit](const ShotHistogram& h) {
        if (h.shots == 0) throw std::invalid_argument("tomography: empty histogram");
        const auto [p0, p1] = marginal(h, qubit);
        return p0 - p1;
    };
    return {e(hist_x), e(hist_y), e(hist_z)};
}

PauliExpectations exact_expectations(const StateVector& state, std::size_t qubit) {
    std::array<double, 3> v{};
    for (std::size_t k = 0; k < 3; ++k) {
        StateVector s = state;
        s.apply(tomography_rotation(kPauliAxes[k], qubit));
        v[k] = 1.0 - 2.0 * s.probability_one(qubit);
    }
    return {v[1], v[2], v[0]};
}

DensityMatrix1Q DensityMatrix1Q::from_bloch(double x, double y, double z) {
    DensityMatrix1Q r;
    r.m(0, 0) = (1.0 + z) / 2.0;
    r.m(1, 1) = (1.0 - z) / 2.0;
    r.m(0, 1) = Amplitude(x, -y) / 2.0;
    r.m(1, 0) = Amplitude(x, y) / 2.0;
    return r;
}

DensityMatrix1Q DensityMatrix1Q::pure(const StateVector& psi) {
    if (psi.n_qubits() != 1) throw std::invalid_argument("pure density matrix needs a 1-qubit state");
    DensityMatrix1Q r;
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) r.m(a, b) = psi[a] * std::conj(psi[b]);
    }
    return r;
}

std::array<double, 2> DensityMatrix1Q::eigenvalues() const {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double off = std::abs(m(0, 1));
    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * off * off);
    return {(a + d - disc) / 2.0, (a + d + disc) / 2.0};
}

void DensityMatrix1Q::validate() const {
    if (max_abs_diff(m, m.adjoint()) > kTol) throw std::domain_error("density matrix is not Hermitian");
    if (std::abs(m.trace() - Amplitude(1.0)) > kTol) throw std::domain_error("density matrix trace is not 1");
    if (eigenvalues()[0] < -kTol) throw std::domain_error("density matrix is not positive semidefinite");
}

Reconstruction reconstruct_rho(const PauliExpectations& e) {
    for (double v : {e.ex, e.ey, e.ez}) {
        if (!std::isfinite(v)) throw std::domain_error("tomography: non-finite expectation");
    }
    Reconstruction out;
    out.bloch_norm = e.bloch_norm();
    if (out.bloch_norm > 1.0 + kBlochSlack) {
        throw std::domain_error("tomography: Bloch vector norm " + std::to_string(out.bloch_norm) +
                                " exceeds the statistical slack");
    }
    double scale = 1.0;
    if (out.bloch_norm > 1.0 + 1e-12) {  // rounding noise on pure states is left alone
        scale = 1.0 / out.bloch_norm;
        out.rescaled = true;
    }
    out.rho = DensityMatrix1Q::from_bloch(e.ex * scale, e.ey * scale, e.ez * scale);
    return out;
}

DensityMatrix1Q pure_rho(const std::vector<GateOp>& ops) {
    StateVector psi(1);
    psi.apply(ops);
    return DensityMatrix1Q::pure(psi);
}

DensityMatrix1Q theoretical_rho(int bit, const protocol::BasisSpec& basis) {
    return pure_rho(protocol::encode_ops(bit, basis));
}

double fidelity(const DensityMatrix1Q& rho, const DensityMatrix1Q& sigma) {
    rho.validate();
    sigma.validate();
    const double overlap = (rho.m * sigma.m).trace().real();
    // A pure state's determinant comes out as rounding noise near 1e-17, and
    // the inner square root would lift that to ~1e-9 in F.
    auto det = [](const DensityMatrix1Q& d) {
        const double v = d.m.det().real();
        return v < kPureDetCutoff ? 0.0 : v;
    };
    const double dets = det(rho) * det(sigma);
    const double f = std::sqrt(std::max(0.0, overlap + 2.0 * std::sqrt(dets)));
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace qkdlab::analysis
