#include "qkdlab/core/random.hpp"

#include <limits>
#include <stdexcept>

namespace qkdlab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngSeed derive_seed(RngSeed parent, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t tag = splitmix64((stream << 32) + index);
    return RngSeed{splitmix64(parent.value ^ tag)};
}

RngSeed derive_seed(RngSeed parent, Stream stream, std::uint64_t index) {
    return derive_seed(parent, static_cast<std::uint64_t>(stream), index);
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("Rng::below: empty range");
    }
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % n;
}

}  // namespace qkdlab
