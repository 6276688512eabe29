#include "qkdlab/protocol/sarg04.hpp"

#include <stdexcept>

namespace qkdlab::protocol {

namespace {

void check_bit(int b, const char* what) {
    if (b != 0 && b != 1) throw std::invalid_argument(std::string("sarg04: ") + what + " must be 0 or 1");
}

}  // namespace

std::vector<GateOp> sarg04_encode(int x, int y) {
    check_bit(x, "x");
    check_bit(y, "y");
    std::vector<GateOp> ops;
    if (x) ops.push_back(GateOp::single(GateKind::X, 0));
    if (y) ops.push_back(GateOp::single(GateKind::H, 0));
    return ops;
}

Sarg04Announcement sarg04_announce(int x, int y, Rng& rng) {
    check_bit(x, "x");
    check_bit(y, "y");
    const int decoy = rng.bit();
    return y ? Sarg04Announcement{decoy, x, 1} : Sarg04Announcement{x, decoy, 0};
}

std::optional<int> sarg04_sift_standard(const Sarg04Announcement& a, int bob_basis, int bob_outcome) {
    check_bit(bob_basis, "bob basis");
    check_bit(bob_outcome, "bob outcome");
    const int same_basis_member = bob_basis ? a.x_state : a.z_state;
    if (bob_outcome == same_basis_member) return std::nullopt;
    return bob_basis ? 0 : 1;
}

SiftResult sift_sarg04_paper(std::span<const int> y, std::span<const int> bob_y) {
    if (y.size() != bob_y.size()) throw std::invalid_argument("sarg04 sift: reference bit lists differ in length");
    std::vector<SiftVerdict> v(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] == bob_y[i] ? SiftVerdict::Accepted : SiftVerdict::Discarded;
    return make_sift_result(std::move(v));
}

}  // namespace qkdlab::protocol
