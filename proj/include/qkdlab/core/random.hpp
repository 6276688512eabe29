#pragma once

#include <cstdint>
#include <random>

namespace qkdlab {

/// Root of every random stream in a run. Two runs with equal seeds and equal
/// inputs produce bit-identical outputs.
struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(RngSeed, RngSeed) = default;
};

/// Named child streams. The numeric values are part of the reproducibility
/// contract: changing one changes every downstream artifact.
enum class Stream : std::uint64_t {
    AliceBits = 1,
    AliceBases = 2,
    BobBases = 3,
    EveSelection = 4,
    Measurement = 5,
    Readout = 6,
    CheckSubset = 7,
    Announcement = 8,
    Calibration = 9,
    Tomography = 10,
    Sweep = 11,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Child seed = splitmix64(parent ^ splitmix64(stream * 2^32 + index)).
/// Every sampling call in the library takes either an explicit seed or a
/// child derived this way, so scenario runs replay end to end.
RngSeed derive_seed(RngSeed parent, std::uint64_t stream, std::uint64_t index = 0);
RngSeed derive_seed(RngSeed parent, Stream stream, std::uint64_t index = 0);

/// Portable generator. std::mt19937_64 output is fixed by the standard; the
/// distributions below are implemented here because the std:: ones are not.
class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(seed.value) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    int bit() { return static_cast<int>(below(2)); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace qkdlab
