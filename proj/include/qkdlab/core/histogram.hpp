#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qkdlab/core/random.hpp"
#include "qkdlab/core/state_vector.hpp"

namespace qkdlab {

/// Outcome counts keyed by bitstring; rightmost character is the lowest
/// measured qubit. Keys are kept sorted so serialization is stable.
struct ShotHistogram {
    std::size_t n_qubits = 0;
    std::uint64_t shots = 0;
    std::map<std::string, std::uint64_t> counts;

    /// Throws std::invalid_argument if counts do not sum to shots or a key
    /// has the wrong length or alphabet.
    void validate() const;

    /// Dense frequency vector indexed like StateVector amplitudes.
    std::vector<double> frequencies() const;

    friend bool operator==(const ShotHistogram&, const ShotHistogram&) = default;
};

/// Multinomial sample over the full joint distribution of the measured
/// qubits (all qubits when `measured` is empty). The histogram bit k is
/// measured[k]. Throws on zero shots.
ShotHistogram measure_all(const StateVector& state, std::uint64_t shots, RngSeed seed,
                          std::span<const std::size_t> measured = {});

/// Draws one basis index from an index-ordered probability vector.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

/// (p0, p1) for histogram bit `qubit`.
std::pair<double, double> marginal(const ShotHistogram& hist, std::size_t qubit);

/// Builds a histogram from dense counts indexed by basis index.
ShotHistogram histogram_from_counts(std::size_t n_qubits, std::span<const std::uint64_t> counts);

void to_json(nlohmann::json& j, const ShotHistogram& h);
void from_json(const nlohmann::json& j, ShotHistogram& h);

}  // namespace qkdlab
