#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qkdlab/core/gates.hpp"
#include "qkdlab/core/random.hpp"
#include "qkdlab/protocol/sifting.hpp"

namespace qkdlab::protocol {

/// x = data bit, y = basis bit: y = 0 gives |x> in Z, y = 1 gives H|x>
/// (|+> or |->).
std::vector<GateOp> sarg04_encode(int x, int y);

/// Alice's public pair: one Z state (0 = |0>, 1 = |1>) and one X state
/// (0 = |+>, 1 = |->). Exactly one of them was sent; `actual_is_x` (= y)
/// stays private.
struct Sarg04Announcement {
    int z_state = 0;
    int x_state = 0;
    int actual_is_x = 0;

    friend bool operator==(const Sarg04Announcement&, const Sarg04Announcement&) = default;
};

/// Pairs the sent state with a uniformly drawn decoy from the other basis.
Sarg04Announcement sarg04_announce(int x, int y, Rng& rng);

/// Bob measured in `bob_basis` (0 = Z, 1 = X) and saw `bob_outcome`. If that
/// outcome is orthogonal to the pair's member in the same basis, the sent
/// state is the other member and the returned key bit is its basis
/// indicator (0 = Z member, 1 = X member). Otherwise nullopt (inconclusive).
std::optional<int> sarg04_sift_standard(const Sarg04Announcement& announcement, int bob_basis, int bob_outcome);

/// Reference-bit sift: accepted iff y[i] == bob_y[i].
SiftResult sift_sarg04_paper(std::span<const int> y, std::span<const int> bob_y);

}  // namespace qkdlab::protocol
