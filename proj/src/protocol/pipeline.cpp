#include "qkdlab/protocol/pipeline.hpp"

#include <stdexcept>

namespace qkdlab::protocol {

namespace {

void check_pipeline(const Pipeline& p) {
    if (p.key_qubits == 0 || p.key_qubits > p.n_qubits || p.n_qubits > kMaxQubits) {
        throw std::invalid_argument("pipeline qubit counts are inconsistent");
    }
    for (const auto& tap : p.intercepts) {
        if (tap.qubit >= p.key_qubits) throw std::out_of_range("intercept on a non-key qubit");
        if (tap.candidates.empty()) throw std::invalid_argument("intercept without candidate bases");
    }
    for (std::size_t q : p.measured) {
        if (q >= p.n_qubits) throw std::out_of_range("measured qubit out of range");
    }
}

/// Rotate into `basis`, collapse, re-prepare the observed state.
void intercept_shot(StateVector& state, std::size_t qubit, const MeasurementBasis& basis, Rng& nature) {
    state.apply(retarget(basis.decode, qubit));
    auto [outcome, post] = collapse(state, qubit, nature);
    state = std::move(post);
    if (outcome) state.apply(GateOp::single(GateKind::X, qubit));  // back to |0>
    state.apply(retarget(basis.prepare[outcome], qubit));
}

std::size_t key_of(std::size_t index, const std::vector<std::size_t>& measured) {
    std::size_t key = 0;
    for (std::size_t k = 0; k < measured.size(); ++k) {
        if (index >> measured[k] & 1U) key |= std::size_t{1} << k;
    }
    return key;
}

}  // namespace

Pipeline Pipeline::with_qubits(std::size_t n) {
    Pipeline p;
    p.n_qubits = n;
    p.key_qubits = n;
    p.measured.resize(n);
    for (std::size_t q = 0; q < n; ++q) p.measured[q] = q;
    return p;
}

void Pipeline::add_preparation(std::size_t qubit, const std::vector<GateOp>& ops) {
    std::size_t k = 0;
    if (!ops.empty() && ops[0].kind == GateKind::X && !ops[0].control) {
        bit_prep.push_back(GateOp::single(GateKind::X, qubit));
        k = 1;
    }
    for (; k < ops.size(); ++k) {
        GateOp op = ops[k];
        op.target = qubit;
        encode.push_back(op);
    }
}

void Pipeline::add_measurement_basis(std::size_t qubit, const std::vector<GateOp>& ops) {
    for (GateOp op : ops) {
        op.target = qubit;
        decode.push_back(op);
    }
}

Circuit Pipeline::to_circuit() const {
    if (!intercepts.empty()) {
        throw std::logic_error("intercept-resend stages need mid-circuit collapse and cannot be exported as a circuit");
    }
    Circuit c(n_qubits);
    c.add(bit_prep);
    c.barrier();
    c.add(encode);
    c.barrier();
    c.add(channel);
    c.barrier();
    c.add(decode);
    c.barrier();
    c.measured = measured;
    c.validate();
    return c;
}

ShotHistogram run_pipeline(const Pipeline& p, std::uint64_t shots, RngSeed seed) {
    check_pipeline(p);
    if (shots == 0) throw std::invalid_argument("run_pipeline: shots must be at least 1");

    if (p.intercepts.empty()) {
        return measure_all(run_circuit(p.to_circuit()), shots, seed, p.measured);
    }

    StateVector prepared(p.n_qubits);
    prepared.apply(p.bit_prep);
    prepared.apply(p.encode);

    Rng nature(seed);
    Rng eve(p.eve_seed);
    std::vector<std::uint64_t> dense(std::size_t{1} << p.measured.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        StateVector state = prepared;
        for (const auto& tap : p.intercepts) {
            const std::size_t pick = tap.candidates.size() == 1 ? 0 : eve.below(tap.candidates.size());
            intercept_shot(state, tap.qubit, tap.candidates[pick], nature);
        }
        state.apply(p.channel);
        state.apply(p.decode);
        const std::vector<double> probs = exact_probabilities(state);
        ++dense[key_of(sample_index(probs, nature), p.measured)];
    }
    return histogram_from_counts(p.measured.size(), dense);
}

namespace {

void enumerate(const Pipeline& p, StateVector state, std::size_t tap_index, double weight, std::vector<double>& acc) {
    if (tap_index == p.intercepts.size()) {
        state.apply(p.channel);
        state.apply(p.decode);
        for (std::size_t k = 0; k < p.measured.size(); ++k) acc[k] += weight * state.probability_one(p.measured[k]);
        return;
    }
    const Intercept& tap = p.intercepts[tap_index];
    const double w_basis = weight / static_cast<double>(tap.candidates.size());
    for (const auto& basis : tap.candidates) {
        StateVector rotated = state;
        rotated.apply(retarget(basis.decode, tap.qubit));
        const double p1 = rotated.probability_one(tap.qubit);
        for (int outcome = 0; outcome < 2; ++outcome) {
            const double pr = outcome ? p1 : 1.0 - p1;
            if (pr < 1e-15) continue;
            StateVector branch = rotated;
            branch.project(tap.qubit, outcome);
            if (outcome) branch.apply(GateOp::single(GateKind::X, tap.qubit));
            branch.apply(retarget(basis.prepare[outcome], tap.qubit));
            enumerate(p, std::move(branch), tap_index + 1, w_basis * pr, acc);
        }
    }
}

}  // namespace

std::optional<std::vector<double>> exact_marginals(const Pipeline& p, std::size_t max_branches) {
    check_pipeline(p);
    std::size_t branches = 1;
    for (const auto& tap : p.intercepts) {
        branches *= 2 * tap.candidates.size();
        if (branches > max_branches) return std::nullopt;
    }
    StateVector prepared(p.n_qubits);
    prepared.apply(p.bit_prep);
    prepared.apply(p.encode);
    std::vector<double> acc(p.measured.size(), 0.0);
    enumerate(p, std::move(prepared), 0, 1.0, acc);
    return acc;
}

}  // namespace qkdlab::protocol
