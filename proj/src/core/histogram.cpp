#include "qkdlab/core/histogram.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qkdlab {

namespace {

std::size_t index_of(const std::string& key) {
    std::size_t idx = 0;
    for (char c : key) idx = (idx << 1) | static_cast<std::size_t>(c == '1');
    return idx;
}

}  // namespace

void ShotHistogram::validate() const {
    std::uint64_t total = 0;
    for (const auto& [key, count] : counts) {
        if (key.size() != n_qubits) {
            throw std::invalid_argument("histogram key '" + key + "' has length " + std::to_string(key.size()) +
                                        ", expected " + std::to_string(n_qubits));
        }
        if (key.find_first_not_of("01") != std::string::npos) {
            throw std::invalid_argument("histogram key '" + key + "' is not a bitstring");
        }
        total += count;
    }
    if (total != shots) {
        throw std::invalid_argument("histogram counts sum to " + std::to_string(total) + ", expected " +
                                    std::to_string(shots));
    }
}

std::vector<double> ShotHistogram::frequencies() const {
    if (n_qubits > kMaxQubits) throw std::invalid_argument("histogram too wide for a dense vector");
    std::vector<double> f(std::size_t{1} << n_qubits, 0.0);
    if (shots == 0) return f;
    for (const auto& [key, count] : counts) {
        f[index_of(key)] += static_cast<double>(count) / static_cast<double>(shots);
    }
    return f;
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
    // Linear inverse-CDF keeps the draw independent of any prebuilt table.
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (probabilities[i] <= 0.0) continue;
        acc += probabilities[i];
        last_nonzero = i;
        if (u < acc) return i;
    }
    return last_nonzero;  // u landed in the rounding gap above the total mass
}

ShotHistogram measure_all(const StateVector& state, std::uint64_t shots, RngSeed seed,
                          std::span<const std::size_t> measured) {
    if (shots == 0) throw std::invalid_argument("measure_all: shots must be at least 1");
    std::vector<std::size_t> qubits(measured.begin(), measured.end());
    if (qubits.empty()) {
        qubits.resize(state.n_qubits());
        for (std::size_t q = 0; q < qubits.size(); ++q) qubits[q] = q;
    }
    for (std::size_t q : qubits) {
        if (q >= state.n_qubits()) throw std::out_of_range("measure_all: measured qubit out of range");
    }

    // Cumulative table + binary search: same draws as sample_index, O(log 2^n) each.
    const std::vector<double> probs = exact_probabilities(state);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) last_nonzero = i;
    }

    Rng rng(seed);
    std::vector<std::uint64_t> dense(std::size_t{1} << qubits.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform();
        std::size_t idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (idx >= probs.size()) idx = last_nonzero;
        std::size_t key = 0;
        for (std::size_t k = 0; k < qubits.size(); ++k) {
            if (idx >> qubits[k] & 1U) key |= std::size_t{1} << k;
        }
        ++dense[key];
    }
    return histogram_from_counts(qubits.size(), dense);
}

std::pair<double, double> marginal(const ShotHistogram& hist, std::size_t qubit) {
    if (qubit >= hist.n_qubits) {
        throw std::out_of_range("marginal: qubit " + std::to_string(qubit) + " out of range");
    }
    if (hist.shots == 0) throw std::invalid_argument("marginal: empty histogram");
    std::uint64_t ones = 0;
    for (const auto& [key, count] : hist.counts) {
        if (key[hist.n_qubits - 1 - qubit] == '1') ones += count;
    }
    const double p1 = static_cast<double>(ones) / static_cast<double>(hist.shots);
    return {1.0 - p1, p1};
}

ShotHistogram histogram_from_counts(std::size_t n_qubits, std::span<const std::uint64_t> counts) {
    ShotHistogram h;
    h.n_qubits = n_qubits;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        h.counts[to_bitstring(i, n_qubits)] = counts[i];
        h.shots += counts[i];
    }
    return h;
}

void to_json(nlohmann::json& j, const ShotHistogram& h) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [key, count] : h.counts) counts[key] = count;
    j = nlohmann::json{{"n_qubits", h.n_qubits}, {"shots", h.shots}, {"counts", counts}};
}

void from_json(const nlohmann::json& j, ShotHistogram& h) {
    h.n_qubits = j.at("n_qubits").get<std::size_t>();
    h.shots = j.at("shots").get<std::uint64_t>();
    h.counts.clear();
    for (const auto& [key, value] : j.at("counts").items()) h.counts[key] = value.get<std::uint64_t>();
    h.validate();
}

}  // namespace qkdlab
