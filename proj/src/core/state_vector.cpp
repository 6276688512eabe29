#include "qkdlab/core/state_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdlab {

namespace {

bool finite(const Amplitude& a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); }

}  // namespace

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count " + std::to_string(n_qubits) + " outside 1.." +
                                    std::to_string(kMaxQubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{});
    amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amps) {
    std::size_t n = 0;
    while (n <= kMaxQubits && (std::size_t{1} << n) < amps.size()) ++n;
    if (n < 1 || n > kMaxQubits || (std::size_t{1} << n) != amps.size()) {
        throw std::invalid_argument("amplitude vector length must be 2^n with n in 1..24");
    }
    StateVector s;
    s.n_qubits_ = n;
    s.amps_ = std::move(amps);
    for (const auto& a : s.amps_) {
        if (!finite(a)) throw std::invalid_argument("non-finite amplitude");
    }
    if (std::abs(s.norm_squared() - 1.0) > kNormTolerance) {
        throw std::invalid_argument("state is not normalized");
    }
    return s;
}

double StateVector::norm_squared() const {
    double n = 0.0;
    for (const auto& a : amps_) n += std::norm(a);
    return n;
}

void StateVector::check_index(std::size_t q) const {
    if (q >= n_qubits_) {
        throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                                std::to_string(n_qubits_) + "-qubit state");
    }
}

void StateVector::apply(const GateOp& op) {
    check_index(op.target);
    if (op.control) {
        check_index(*op.control);
        if (*op.control == op.target) throw std::invalid_argument("control equals target");
    }
    const Mat2 u = op.matrix();
    const std::size_t tbit = std::size_t{1} << op.target;
    const std::size_t cmask = op.control ? (std::size_t{1} << *op.control) : 0;
    bool ok = true;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & tbit) || (i & cmask) != cmask) continue;
        const std::size_t j = i | tbit;
        const Amplitude a0 = amps_[i];
        const Amplitude a1 = amps_[j];
        amps_[i] = u(0, 0) * a0 + u(0, 1) * a1;
        amps_[j] = u(1, 0) * a0 + u(1, 1) * a1;
        ok = ok && finite(amps_[i]) && finite(amps_[j]);
    }
    if (!ok) throw std::domain_error("gate produced a non-finite amplitude");
}

void StateVector::apply(std::span<const GateOp> ops) {
    for (const auto& op : ops) apply(op);
}

double StateVector::probability_one(std::size_t qubit) const {
    check_index(qubit);
    const std::size_t bit = std::size_t{1} << qubit;
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) p += std::norm(amps_[i]);
    }
    return p;
}

void StateVector::project(std::size_t qubit, int outcome) {
    check_index(qubit);
    const double p1 = probability_one(qubit);
    const double p = outcome ? p1 : 1.0 - p1;
    if (p <= 1e-300) {
        throw std::domain_error("projection onto a zero-probability outcome");
    }
    const std::size_t bit = std::size_t{1} << qubit;
    const double scale = 1.0 / std::sqrt(p);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (static_cast<bool>(i & bit) == static_cast<bool>(outcome)) {
            amps_[i] *= scale;
        } else {
            amps_[i] = 0.0;
        }
    }
}

StateVector new_state(std::size_t n_qubits) { return StateVector(n_qubits); }

StateVector apply_gate(StateVector state, const GateOp& op) {
    state.apply(op);
    return state;
}

double overlap(const StateVector& a, const StateVector& b) {
    if (a.dimension() != b.dimension()) throw std::invalid_argument("overlap: dimension mismatch");
    Amplitude s{};
    for (std::size_t i = 0; i < a.dimension(); ++i) s += std::conj(a[i]) * b[i];
    return std::abs(s);
}

std::vector<double> exact_probabilities(const StateVector& state) {
    std::vector<double> p(state.dimension());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state[i]);
    return p;
}

double marginal_one(std::span<const double> probabilities, std::size_t qubit) {
    const std::size_t bit = std::size_t{1} << qubit;
    if (bit >= probabilities.size()) throw std::out_of_range("marginal_one: qubit out of range");
    double p = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (i & bit) p += probabilities[i];
    }
    return p;
}

std::string to_bitstring(std::size_t index, std::size_t n_qubits) {
    std::string s(n_qubits, '0');
    for (std::size_t q = 0; q < n_qubits; ++q) {
        if (index >> q & 1U) s[n_qubits - 1 - q] = '1';
    }
    return s;
}

std::pair<int, StateVector> collapse(const StateVector& state, std::size_t qubit, Rng& rng) {
    const double p1 = state.probability_one(qubit);
    const int outcome = rng.uniform() < p1 ? 1 : 0;
    StateVector post = state;
    post.project(qubit, outcome);
    return {outcome, std::move(post)};
}

}  // namespace qkdlab
