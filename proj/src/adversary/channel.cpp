#include "qkdlab/adversary/channel.hpp"

#include <algorithm>
#include <stdexcept>

#include "qkdlab/core/circuit.hpp"

namespace qkdlab::adversary {

std::vector<std::size_t> resolve_attacked(const EveConfig& eve, std::size_t n_qubits, RngSeed seed) {
    std::vector<std::size_t> out;
    if (eve.attacked_fraction) {
        const double f = *eve.attacked_fraction;
        if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("eve.attacked_fraction must lie in [0, 1]");
        Rng rng(seed);
        for (std::size_t q = 0; q < n_qubits; ++q) {
            if (rng.bernoulli(f)) out.push_back(q);
        }
        return out;
    }
    out = eve.attacked;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (std::size_t q : out) {
        if (q >= n_qubits) {
            throw std::out_of_range("eve attacks q[" + std::to_string(q) + "] but only " + std::to_string(n_qubits) +
                                    " qubits are sent");
        }
    }
    return out;
}

Pipeline apply_intercept_resend(Pipeline pipeline, const std::vector<std::size_t>& attacked, const EveConfig& eve) {
    for (std::size_t q : attacked) {
        if (q >= pipeline.key_qubits) {
            throw std::out_of_range("intercept index " + std::to_string(q) + " is not a key qubit");
        }
        protocol::Intercept tap;
        tap.qubit = q;
        if (auto it = eve.fixed.find(q); it != eve.fixed.end()) {
            tap.candidates.push_back(it->second);
        } else {
            if (eve.basis_set.empty()) {
                throw std::invalid_argument("eve has no fixed basis for q[" + std::to_string(q) + "] and an empty basis set");
            }
            tap.candidates = eve.basis_set;
        }
        pipeline.intercepts.push_back(std::move(tap));
    }
    return pipeline;
}

Pipeline inject_controlled_pauli(Pipeline pipeline, const NoiseAttackConfig& cfg) {
    if (cfg.targets.empty()) return pipeline;
    if (cfg.ancilla_value != 0 && cfg.ancilla_value != 1) throw std::invalid_argument("ancilla_value must be 0 or 1");
    const std::size_t ancilla = pipeline.n_qubits;
    if (ancilla + 1 > kMaxQubits) throw std::invalid_argument("no room for the noise ancilla");
    for (const auto& t : cfg.targets) {
        if (t.qubit == ancilla) throw std::invalid_argument("noise target equals the ancilla");
        if (t.qubit >= pipeline.key_qubits) {
            throw std::out_of_range("noise target q[" + std::to_string(t.qubit) + "] is not a key qubit");
        }
        if (t.gate != GateKind::X && t.gate != GateKind::Y && t.gate != GateKind::Z) {
            throw std::invalid_argument("noise attack gate must be CX, CY or CZ");
        }
    }
    pipeline.n_qubits += 1;
    if (cfg.ancilla_value == 1) pipeline.bit_prep.push_back(GateOp::single(GateKind::X, ancilla));
    for (const auto& t : cfg.targets) pipeline.channel.push_back(GateOp::controlled(t.gate, ancilla, t.qubit));
    return pipeline;
}

ReadoutNoiseModel ReadoutNoiseModel::uniform(std::size_t n_qubits, double p01, double p10) {
    return {std::vector<double>(n_qubits, p01), std::vector<double>(n_qubits, p10)};
}

void ReadoutNoiseModel::validate() const {
    if (p01.size() != p10.size()) throw std::invalid_argument("readout model: p01 and p10 lengths differ");
    for (std::size_t q = 0; q < p01.size(); ++q) {
        for (double p : {p01[q], p10[q]}) {
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("readout model: probability outside [0, 1]");
        }
    }
}

ReadoutNoiseModel ReadoutNoiseModel::slice(std::size_t first, std::size_t count) const {
    if (first + count > p01.size()) throw std::out_of_range("readout model slice out of range");
    return {std::vector<double>(p01.begin() + first, p01.begin() + first + count),
            std::vector<double>(p10.begin() + first, p10.begin() + first + count)};
}

ShotHistogram apply_readout_noise(const ShotHistogram& hist, const ReadoutNoiseModel& model, RngSeed seed) {
    model.validate();
    if (model.n_qubits() != hist.n_qubits) {
        throw std::invalid_argument("readout model covers " + std::to_string(model.n_qubits()) +
                                    " qubits, histogram has " + std::to_string(hist.n_qubits));
    }
    const std::size_t n = hist.n_qubits;
    Rng rng(seed);
    ShotHistogram out;
    out.n_qubits = n;
    out.shots = hist.shots;
    for (const auto& [key, count] : hist.counts) {
        for (std::uint64_t s = 0; s < count; ++s) {
            std::string observed = key;
            for (std::size_t q = 0; q < n; ++q) {
                char& c = observed[n - 1 - q];
                const double flip = c == '1' ? model.p10[q] : model.p01[q];
                if (rng.bernoulli(flip)) c = c == '1' ? '0' : '1';
            }
            ++out.counts[observed];
        }
    }
    return out;
}

CalibrationSet build_calibration_set(std::size_t n_qubits, const ReadoutNoiseModel& model, std::uint64_t shots,
                                     RngSeed seed, std::optional<CalibrationMode> mode) {
    const CalibrationMode m =
        mode.value_or(n_qubits <= kFullCalibrationMaxQubits ? CalibrationMode::Full : CalibrationMode::Tensored);
    if (m == CalibrationMode::Full && n_qubits > kFullCalibrationMaxQubits) {
        throw std::invalid_argument("full calibration is limited to " + std::to_string(kFullCalibrationMaxQubits) +
                                    " qubits; use tensored mode");
    }
    if (model.n_qubits() != n_qubits) throw std::invalid_argument("calibration: readout model dimension mismatch");

    std::vector<std::size_t> prepared;
    if (m == CalibrationMode::Full) {
        for (std::size_t s = 0; s < (std::size_t{1} << n_qubits); ++s) prepared.push_back(s);
    } else {
        prepared = {0, (std::size_t{1} << n_qubits) - 1};
    }

    CalibrationSet cal;
    cal.n_qubits = n_qubits;
    cal.mode = m;
    for (std::size_t k = 0; k < prepared.size(); ++k) {
        Circuit c(n_qubits);
        for (std::size_t q = 0; q < n_qubits; ++q) {
            if (prepared[k] >> q & 1U) c.add(GateOp::single(GateKind::X, q));
        }
        c.measure_all();
        const ShotHistogram ideal = measure_all(run_circuit(c), shots, derive_seed(seed, 0, k));
        cal.observed[to_bitstring(prepared[k], n_qubits)] = apply_readout_noise(ideal, model, derive_seed(seed, 1, k));
    }
    return cal;
}

}  // namespace qkdlab::adversary
